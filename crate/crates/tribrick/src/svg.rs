//! Static SVG line drawings: brick wireframe plus inscribed triangle, one
//! orthographic (isometric) panel per configuration.

use std::fmt::Write;

use tribrick_core::geometry::{Brick, Placement, Point3};

pub const WIDTH: f64 = 900.0;
pub const HEIGHT: f64 = 300.0;
const MARGIN: f64 = 40.0;
const CAPTION_SPACE: f64 = 50.0;

/// One drawing.
#[derive(Clone, Debug)]
pub struct Panel {
    pub title: String,
    pub caption: String,
    pub brick: Brick,
    pub placement: Placement,
}

fn project(p: &Point3) -> (f64, f64) {
    let (c, s) = (std::f64::consts::FRAC_PI_6.cos(), 0.5);
    ((p[0] - p[1]) * c, (p[0] + p[1]) * s - p[2])
}

fn corners(brick: &Brick) -> [Point3; 8] {
    let [a, b, c] = brick.dims();
    let mut out = [[0.0; 3]; 8];
    for (k, o) in out.iter_mut().enumerate() {
        *o = [
            if k & 1 != 0 { a } else { 0.0 },
            if k & 2 != 0 { b } else { 0.0 },
            if k & 4 != 0 { c } else { 0.0 },
        ];
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the panels side by side in a 900 x 300 viewBox.
pub fn render(panels: &[Panel]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"900\" height=\"300\" viewBox=\"0 0 900 300\">\n",
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"900\" height=\"300\" fill=\"white\"/>\n");
    let n = panels.len().max(1) as f64;
    let pw = WIDTH / n;
    for (i, panel) in panels.iter().enumerate() {
        let x0 = pw * i as f64;
        let box_w = pw - 2.0 * MARGIN;
        let box_h = HEIGHT - MARGIN - CAPTION_SPACE;

        let pts: Vec<(f64, f64)> = corners(&panel.brick).iter().map(project).collect();
        let (mut umin, mut umax, mut vmin, mut vmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (u, v) in &pts {
            umin = umin.min(*u);
            umax = umax.max(*u);
            vmin = vmin.min(*v);
            vmax = vmax.max(*v);
        }
        let scale = (box_w / (umax - umin).max(1e-9)).min(box_h / (vmax - vmin).max(1e-9));
        let cx = x0 + pw / 2.0;
        let cy = MARGIN / 2.0 + box_h / 2.0 + 10.0;
        let to_screen = |p: &Point3| {
            let (u, v) = project(p);
            (cx + (u - (umin + umax) / 2.0) * scale, cy + (v - (vmin + vmax) / 2.0) * scale)
        };

        writeln!(out, "<g id=\"panel-{}\">", i + 1).unwrap();
        let corners = corners(&panel.brick);
        for a in 0..8usize {
            for bit in [1usize, 2, 4] {
                if a & bit == 0 {
                    let (p, q) = (to_screen(&corners[a]), to_screen(&corners[a | bit]));
                    writeln!(
                        out,
                        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#777777\" stroke-width=\"1\"/>",
                        p.0, p.1, q.0, q.1
                    )
                    .unwrap();
                }
            }
        }
        let verts = panel.placement.vertices(&panel.brick);
        let screen: Vec<(f64, f64)> = verts.iter().map(to_screen).collect();
        let points: Vec<String> = screen.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        writeln!(
            out,
            "<polygon points=\"{}\" fill=\"#d94f30\" fill-opacity=\"0.25\" stroke=\"#d94f30\" stroke-width=\"2\"/>",
            points.join(" ")
        )
        .unwrap();
        for ((x, y), label) in screen.iter().zip(["A", "B", "C"]) {
            writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#d94f30\"/>").unwrap();
            writeln!(
                out,
                "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>",
                x + 5.0,
                y - 5.0
            )
            .unwrap();
        }
        writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            cx,
            HEIGHT - CAPTION_SPACE + 22.0,
            escape(&panel.title)
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            cx,
            HEIGHT - CAPTION_SPACE + 40.0,
            escape(&panel.caption)
        )
        .unwrap();
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tribrick_core::geometry::SkewTriple;

    #[test]
    fn one_group_per_panel() {
        let panel = Panel {
            title: "cube".into(),
            caption: "a < b".into(),
            brick: Brick::cube(),
            placement: Placement::new(SkewTriple::reference(), [0.0, 1.0, 0.0]).unwrap(),
        };
        let svg = render(&[panel.clone(), panel]);
        assert!(svg.contains("viewBox=\"0 0 900 300\""));
        assert_eq!(svg.matches("<g id=\"panel-").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert_eq!(svg.matches("<line").count(), 24);
        assert!(svg.contains("a &lt; b"));
    }
}
