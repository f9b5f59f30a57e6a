//! Static SVG rendering of experiment summaries: per-(method, n) error
//! boxplots and mean-error lines on log₁₀ axes. No external dependencies.

use kpls_core::harness::{ExperimentReport, Method, SummaryRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

fn color(method: Method) -> &'static str {
    match method {
        Method::Kpls => "#202020",
        Method::Kcg => "#9a9a9a",
    }
}

fn log10_clamped(v: f64) -> f64 {
    v.max(1e-300).log10()
}

struct Scale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let span = (self.hi - self.lo).max(1e-12);
        self.out_lo + (v - self.lo) / span * (self.out_hi - self.out_lo)
    }
}

/// Renders boxplots (q1/median/q3 of the squared L² error) per (method, n)
/// plus a line through the means, one series per method.
pub fn render_summary(report: &ExperimentReport) -> String {
    let rows: Vec<&SummaryRow> =
        report.summary.iter().filter(|r| r.effective_m > 0 && r.mean_error.is_finite()).collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if rows.is_empty() {
        svg.push_str(
            "<text x=\"20\" y=\"40\" font-family=\"monospace\">no successful repetitions</text>\n",
        );
        svg.push_str("</svg>\n");
        return svg;
    }

    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
    let mut ys: Vec<f64> = Vec::new();
    for r in &rows {
        ys.push(log10_clamped(r.q1_error));
        ys.push(log10_clamped(r.q3_error));
        ys.push(log10_clamped(r.mean_error));
    }
    let pad = 0.15;
    let x_scale = Scale {
        lo: xs.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
        hi: xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
        out_lo: MARGIN_L,
        out_hi: WIDTH - MARGIN_R,
    };
    let y_scale = Scale {
        lo: ys.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
        hi: ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
        out_lo: HEIGHT - MARGIN_B,
        out_hi: MARGIN_T,
    };

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B,
    ));
    svg.push_str(&format!(
        "<text x=\"{x}\" y=\"{y}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\">log10 n</text>\n",
        x = (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        y = HEIGHT - 14.0,
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{y}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {y})\">log10 error</text>\n",
        y = (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
    ));

    // Boxplots, offset slightly per method so the series do not overlap.
    for row in &rows {
        let offset = match row.method {
            Method::Kpls => -8.0,
            Method::Kcg => 8.0,
        };
        let cx = x_scale.map((row.n as f64).log10()) + offset;
        let y1 = y_scale.map(log10_clamped(row.q1_error));
        let y3 = y_scale.map(log10_clamped(row.q3_error));
        let ym = y_scale.map(log10_clamped(row.median_error));
        let half = 6.0;
        svg.push_str(&format!(
            "<rect x=\"{x}\" y=\"{top}\" width=\"{w}\" height=\"{h}\" fill=\"none\" \
             stroke=\"{c}\"/>\n",
            x = cx - half,
            top = y3.min(y1),
            w = 2.0 * half,
            h = (y1 - y3).abs().max(0.5),
            c = color(row.method),
        ));
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{ym}\" x2=\"{x2}\" y2=\"{ym}\" stroke=\"{c}\" \
             stroke-width=\"2\"/>\n",
            x1 = cx - half,
            x2 = cx + half,
            c = color(row.method),
        ));
    }

    // Mean lines per method.
    for method in [Method::Kpls, Method::Kcg] {
        let mut pts: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| (r.n, r.mean_error))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        pts.sort_by_key(|&(n, _)| n);
        let path: Vec<String> = pts
            .iter()
            .map(|&(n, e)| {
                format!(
                    "{:.2},{:.2}",
                    x_scale.map((n as f64).log10()),
                    y_scale.map(log10_clamped(e))
                )
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            path.join(" "),
            color(method),
        ));
    }

    // Legend.
    for (i, method) in [Method::Kpls, Method::Kcg].into_iter().enumerate() {
        let y = MARGIN_T + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"{c}\" \
             stroke-width=\"2\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" font-family=\"monospace\" font-size=\"12\">{label}</text>\n",
            x1 = WIDTH - MARGIN_R + 12.0,
            x2 = WIDTH - MARGIN_R + 40.0,
            c = color(method),
            tx = WIDTH - MARGIN_R + 46.0,
            ty = y + 4.0,
            label = method.label(),
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
