//! SVG drawing of a tiling.

use std::fmt::Write;

use aztec_core::geometry::{Heading, Orientation, Tiling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ColorBy {
    Heading,
    Orientation,
}

pub fn heading_color(h: Heading) -> &'static str {
    match h {
        Heading::North => "#d62728",
        Heading::South => "#1f77b4",
        Heading::East => "#2ca02c",
        Heading::West => "#ffbf00",
    }
}

pub fn orientation_color(o: Orientation) -> &'static str {
    match o {
        Orientation::Horizontal => "#4c72b0",
        Orientation::Vertical => "#dd8452",
    }
}

/// One `<rect>` per domino, in cell units with the diamond's centre at the
/// middle of the canvas and `y` pointing up.
pub fn render_svg(t: &Tiling, color_by: ColorBy) -> String {
    let n = t.order() as i32;
    let side = (2 * n).max(1);
    let pixels = (side * 12).clamp(120, 1600);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pixels}" height="{pixels}" viewBox="0 0 {side} {side}">"#
    )
    .unwrap();
    writeln!(out, r#"<g stroke="black" stroke-width="0.04">"#).unwrap();
    for (id, d) in t.dominoes().iter().enumerate() {
        let (w, h) = match d.orientation {
            Orientation::Horizontal => (2, 1),
            Orientation::Vertical => (1, 2),
        };
        let x = d.anchor.x + n;
        let y = n - (d.anchor.y + h);
        let fill = match color_by {
            ColorBy::Heading => heading_color(t.heading_of(id)),
            ColorBy::Orientation => orientation_color(d.orientation),
        };
        writeln!(out, r#"<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}"/>"#).unwrap();
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_pair() {
        let svg = render_svg(&Tiling::all_horizontal(1), ColorBy::Heading);
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(svg.contains(heading_color(Heading::North)));
        assert!(svg.contains(heading_color(Heading::South)));
        assert!(svg.contains(r#"<rect x="0" y="0" width="2" height="1""#));
    }

    #[test]
    fn brick_wall_has_two_bands() {
        let svg = render_svg(&Tiling::all_horizontal(4), ColorBy::Heading);
        assert!(!svg.contains(heading_color(Heading::East)));
        assert!(!svg.contains(heading_color(Heading::West)));
        let svg = render_svg(&Tiling::all_horizontal(4), ColorBy::Orientation);
        assert!(!svg.contains(orientation_color(Orientation::Vertical)));
    }
}
