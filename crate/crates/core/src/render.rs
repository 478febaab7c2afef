//! SVG heatmap of a behavior map. Output is a pure function of the map and
//! style, so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::atlas::BehaviorMap;

/// Blue and orange first, for two-behavior maps.
pub const DEFAULT_COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
pub const WANDER_COLOR: &str = "#7f7f7f";

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub cell_px: usize,
    /// Fill per palette index; falls back to [`DEFAULT_COLORS`].
    pub colors: Vec<String>,
    pub title: Option<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            cell_px: 4,
            colors: Vec::new(),
            title: None,
        }
    }
}

impl SvgStyle {
    fn color(&self, m: &BehaviorMap, label: usize) -> String {
        if let Some(c) = self.colors.get(label) {
            return c.clone();
        }
        if m.is_wander(label) {
            return WANDER_COLOR.to_string();
        }
        DEFAULT_COLORS[label % DEFAULT_COLORS.len()].to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(m: &BehaviorMap, style: &SvgStyle) -> String {
    let (g, p) = (m.n_gamma(), m.n_p());
    let c = style.cell_px.max(1);
    let (left, top, bottom, legend_w) = (56, 28, 44, 140);
    let (plot_w, plot_h) = (g * c, p * c);
    let width = left + plot_w + 16 + legend_w;
    let height = top + plot_h + bottom;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let title = style.title.clone().unwrap_or_else(|| m.world_id.clone());
    let _ = writeln!(s, r#"<text x="{left}" y="18">{}</text>"#, escape(&title));
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for ip in 0..p {
        for ig in 0..g {
            let l = m.label(ip, ig);
            let (x, y) = (left + ig * c, top + (p - 1 - ip) * c);
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{x}" y="{y}" width="{c}" height="{c}" fill="{}"/>"#,
                style.color(m, l)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // axis ticks at the sampled extremes
    let (g0, g1) = (m.spec.gamma_samples[0], m.spec.gamma_samples[g - 1]);
    let (p0, p1) = (m.spec.p_samples[0], m.spec.p_samples[p - 1]);
    let base_y = top + plot_h;
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="start">{g0}</text>"#, base_y + 14);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{g1}</text>"#, left + plot_w, base_y + 14);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">γ</text>"#,
        left + plot_w / 2,
        base_y + 32
    );
    let _ = writeln!(s, r#"<text x="{}" y="{base_y}" text-anchor="end">{p0}</text>"#, left - 4);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{p1}</text>"#, left - 4, top + 10);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">p</text>"#,
        left - 30,
        top + plot_h / 2
    );

    let lx = left + plot_w + 16;
    for (k, l) in m.distinct_labels().into_iter().enumerate() {
        let y = top + k * 18;
        let _ = writeln!(
            s,
            r#"<rect class="legend" x="{lx}" y="{y}" width="12" height="12" fill="{}"/>"#,
            style.color(m, l)
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 18, y + 11, escape(m.label_name(l)));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::GridSpec;

    fn fills(svg: &str) -> Vec<&str> {
        svg.lines()
            .filter(|l| l.contains(r#"class="cell""#))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect()
    }

    #[test]
    fn uniform_map_has_nine_equal_cells() {
        let m = BehaviorMap::new(GridSpec::square(3).unwrap(), vec![1; 9], "u", vec!["a".into(), "b".into()]).unwrap();
        let svg = render_svg(&m, &SvgStyle::default());
        let f = fills(&svg);
        assert_eq!(f.len(), 9);
        assert!(f.iter().all(|&x| x == DEFAULT_COLORS[1]));
        assert!(svg.contains(">γ</text>") && svg.contains(">p</text>"));
        assert_eq!(svg, render_svg(&m, &SvgStyle::default()));
    }

    #[test]
    fn palette_override_and_wander_grey() {
        let m = BehaviorMap::new(
            GridSpec::square(3).unwrap(),
            vec![0, 0, 0, 0, 2, 0, 0, 0, 0],
            "w",
            vec!["a".into(), "b".into(), "wander".into()],
        )
        .unwrap();
        let svg = render_svg(&m, &SvgStyle::default());
        assert_eq!(fills(&svg).iter().filter(|&&x| x == WANDER_COLOR).count(), 1);
        let style = SvgStyle {
            colors: vec!["#000000".into()],
            ..SvgStyle::default()
        };
        let svg = render_svg(&m, &style);
        assert_eq!(fills(&svg).iter().filter(|&&x| x == "#000000").count(), 8);
    }

    #[test]
    fn titles_are_escaped() {
        let m = BehaviorMap::new(GridSpec::square(3).unwrap(), vec![0; 9], "a<b", vec!["x".into()]).unwrap();
        assert!(render_svg(&m, &SvgStyle::default()).contains("a&lt;b"));
    }
}
