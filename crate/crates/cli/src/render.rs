//! SVG output. Coordinates are computed exactly and printed with a fixed
//! number of decimals, so equal inputs give byte-equal files.

use std::fmt::Write;

use itmlab_core::{q, Interval, ItmMap, Rational, ReturnMapData, SignedPoint};

const SIDE: i64 = 400;
const MARGIN: i64 = 20;
const ROW: i64 = 24;
const DIGITS: u32 = 3;

const PALETTE: [&str; 8] = ["#d1495b", "#00798c", "#edae49", "#30638e", "#66a182", "#8d6a9f", "#003d5b", "#e07a5f"];

fn coord(x: &Rational) -> String {
    x.to_decimal(DIGITS)
}

/// Horizontal position of `x ∈ [0,1]`.
fn px(x: &Rational) -> Rational {
    x.scale(SIDE) + Rational::from_integer(MARGIN)
}

/// Vertical position of `y ∈ [0,1]`, with `y = 0` at the bottom.
fn py(y: &Rational) -> Rational {
    (Rational::one() - y).scale(SIDE) + Rational::from_integer(MARGIN)
}

fn header(out: &mut String, width: i64, height: i64) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
}

/// Graph of the map on the unit square: the diagonal, one segment per
/// branch, and dotted verticals at the discontinuities.
pub fn map_svg(map: &ItmMap) -> String {
    let mut out = String::new();
    let full = SIDE + 2 * MARGIN;
    header(&mut out, full, full);
    let zero = Rational::zero();
    let one = Rational::one();
    writeln!(
        out,
        r#"<rect class="frame" x="{m}" y="{m}" width="{SIDE}" height="{SIDE}" fill="none" stroke="black"/>"#,
        m = MARGIN
    )
    .unwrap();
    writeln!(
        out,
        r#"<line class="diagonal" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
        coord(&px(&zero)),
        coord(&py(&zero)),
        coord(&px(&one)),
        coord(&py(&one))
    )
    .unwrap();
    for i in 1..map.r() {
        let b = map.beta_at(i);
        writeln!(
            out,
            r#"<line class="discontinuity" data-index="{i}" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="silver" stroke-dasharray="1 3"/>"#,
            coord(&py(&zero)),
            coord(&py(&one)),
            x = coord(&px(b)),
        )
        .unwrap();
    }
    for i in 1..=map.r() {
        let dom = map.branch_interval(i);
        let g = map.gamma_at(i);
        writeln!(
            out,
            r#"<line class="branch" data-index="{i}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>"#,
            coord(&px(&dom.left)),
            coord(&py(&(&dom.left + g))),
            coord(&px(&dom.right)),
            coord(&py(&(&dom.right + g))),
            PALETTE[(i - 1) % PALETTE.len()]
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Row `t` shows `Tᵗ(J_j)` for every continuity interval that has not yet
/// returned; a piece's last row is its return into the component.
pub fn orbit_svg(map: &ItmMap, component: usize, data: &ReturnMapData) -> String {
    let rows = data.return_times.iter().copied().max().unwrap_or(0) + 1;
    let width = SIDE + 2 * MARGIN;
    let height = ROW * rows as i64 + 2 * MARGIN;
    let mut out = String::new();
    header(&mut out, width, height);
    writeln!(out, r#"<title>component {component} {}</title>"#, interval_label(&data.component)).unwrap();
    let bar = q(ROW * 2, 3);
    for t in 0..rows {
        let top = Rational::from_integer(MARGIN + ROW * t as i64);
        writeln!(
            out,
            r#"<rect class="component" data-row="{t}" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            coord(&px(&data.component.left)),
            coord(&top),
            coord(&data.component.length().scale(SIDE)),
            coord(&bar)
        )
        .unwrap();
    }
    for j in 1..=data.n() {
        let mut piece = data.continuity_interval(j);
        let ret = data.return_times[j - 1];
        for t in 0..=ret {
            let top = Rational::from_integer(MARGIN + ROW * t as i64);
            let class = if t == ret { "return" } else { "piece" };
            writeln!(
                out,
                r#"<rect class="{class}" data-piece="{j}" data-row="{t}" x="{}" y="{}" width="{}" height="{}" fill="{}" fill-opacity="{}"/>"#,
                coord(&px(&piece.left)),
                coord(&top),
                coord(&piece.length().scale(SIDE)),
                coord(&bar),
                PALETTE[(j - 1) % PALETTE.len()],
                if t == ret { "0.9" } else { "0.5" }
            )
            .unwrap();
            if t < ret {
                let branch = map.branch_of(&SignedPoint::plus(piece.left.clone()).expect("pieces stay in [0,1)"));
                piece = piece.translate(map.gamma_at(branch));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn interval_label(iv: &Interval) -> String {
    format!("[{}, {})", iv.left, iv.right)
}
