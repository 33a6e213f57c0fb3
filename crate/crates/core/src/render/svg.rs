use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::Result;
use crate::tiling::{TileShape, Tiling};

use super::{default_bar, interval_of, tile_colors, Color, Fill, Layer, LayerSource, Scene, Style};

/// Pixel coordinate with six decimals, trailing zeros trimmed.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn path_data(scene: &Scene, rings: &[Vec<[f64; 2]>]) -> String {
    let mut d = String::new();
    for ring in rings.iter().filter(|r| r.len() > 1) {
        let closed = ring.first() == ring.last();
        let pts = if closed { &ring[..ring.len() - 1] } else { &ring[..] };
        for (k, p) in pts.iter().enumerate() {
            let q = scene.to_px(*p);
            let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { "L" }, num(q[0]), num(q[1]));
        }
        if closed {
            d.push('Z');
        }
    }
    d
}

fn group_open(out: &mut String, style: &Style, fill: Option<Color>) {
    let fill = fill.map(|c| c.hex()).unwrap_or_else(|| "none".into());
    let stroke = style.stroke.map(|c| c.hex()).unwrap_or_else(|| "none".into());
    let _ = writeln!(
        out,
        r#"<g fill="{fill}" stroke="{stroke}" stroke-width="{}" opacity="{}" fill-rule="evenodd" stroke-linejoin="round">"#,
        num(style.stroke_width),
        num(style.opacity)
    );
}

/// Circles for the points of a cloud, at most one per output pixel.
fn dots<I: Iterator<Item = [f64; 2]>>(out: &mut String, scene: &Scene, pts: I, r: f64, fill: Option<&str>) {
    let mut seen = BTreeSet::new();
    for p in pts {
        let q = scene.to_px(p);
        if q[0] < -r || q[1] < -r || q[0] > scene.width as f64 + r || q[1] > scene.height as f64 + r {
            continue;
        }
        if !seen.insert((q[0].floor() as i64, q[1].floor() as i64)) {
            continue;
        }
        let c = (q[0].floor() + 0.5, q[1].floor() + 0.5);
        match fill {
            Some(f) => {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}" fill="{f}"/>"#, num(c.0), num(c.1), num(r));
            }
            None => {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}"/>"#, num(c.0), num(c.1), num(r));
            }
        }
    }
}

fn tiling_layer(out: &mut String, scene: &Scene, t: &Tiling, style: &Style) {
    group_open(out, style, None);
    let colors = tile_colors(t, style.fill);
    // outlines per shape, computed once
    let outlines: Vec<Vec<Vec<[f64; 2]>>> = t.shapes().iter().map(TileShape::outline).collect();
    let bar = style.bar_height.unwrap_or_else(|| default_bar(t));
    for (tile, color) in t.tiles().iter().zip(&colors) {
        let fill = color.map(|c| c.hex()).unwrap_or_else(|| "none".into());
        let shape = t.shape_of(tile);
        if let TileShape::Cloud { cloud, .. } = shape {
            let f = &tile.transform;
            let pts = cloud.points().map(|p| {
                let q = f.apply(p);
                [q[0], if q.len() > 1 { q[1] } else { 0.0 }]
            });
            dots(out, scene, pts, style.point_radius, Some(&fill));
            continue;
        }
        if t.dim() == 1 {
            let (lo, hi) = interval_of(t, tile);
            let a = scene.to_px([lo, bar]);
            let b = scene.to_px([hi, 0.0]);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
                num(a[0]),
                num(a[1]),
                num(b[0] - a[0]),
                num(b[1] - a[1])
            );
            continue;
        }
        let rings: Vec<Vec<[f64; 2]>> = outlines[tile.shape]
            .iter()
            .map(|ring| ring.iter().map(|&p| tile.transform.apply2(p)).collect())
            .collect();
        let _ = writeln!(out, r#"<path d="{}" fill="{fill}"/>"#, path_data(scene, &rings));
    }
    out.push_str("</g>\n");
}

fn layer(out: &mut String, scene: &Scene, layer: &Layer) {
    let style = &layer.style;
    let solid = match style.fill {
        Fill::Solid(c) => Some(c),
        _ => None,
    };
    match &layer.source {
        LayerSource::Tiling(t) => tiling_layer(out, scene, t, style),
        LayerSource::Cloud(c) => {
            group_open(out, style, solid.or(Some(Color::BLACK)));
            let pts = c.points().map(|p| [p[0], if p.len() > 1 { p[1] } else { 0.0 }]);
            dots(out, scene, pts, style.point_radius, None);
            out.push_str("</g>\n");
        }
        LayerSource::Polylines(lines) => {
            group_open(out, style, solid);
            let _ = writeln!(out, r#"<path d="{}"/>"#, path_data(scene, lines));
            out.push_str("</g>\n");
        }
        LayerSource::Mask(m) => {
            group_open(out, style, solid.or(Some(Color::BLACK)));
            let (w, h) = (m.width(), m.height());
            let win = m.window();
            let dx = win.extent(0) / w as f64;
            let (dy, y_top) = if h == 1 {
                // a 1-d mask is drawn as a strip four pixels tall
                let (_, sy) = scene.pixel_scale();
                (4.0 * sy, 2.0 * sy)
            } else {
                (win.extent(1) / h as f64, win.max[1])
            };
            for j in 0..h {
                let mut i = 0;
                while i < w {
                    if !m.is_on(i, j) {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i < w && m.is_on(i, j) {
                        i += 1;
                    }
                    let a = scene.to_px([win.min[0] + start as f64 * dx, y_top - j as f64 * dy]);
                    let b = scene.to_px([win.min[0] + i as f64 * dx, y_top - (j + 1) as f64 * dy]);
                    let _ = writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                        num(a[0]),
                        num(a[1]),
                        num(b[0] - a[0]),
                        num(b[1] - a[1])
                    );
                }
            }
            out.push_str("</g>\n");
        }
        LayerSource::Circles(circles) => {
            group_open(out, style, solid);
            let (sx, _) = scene.pixel_scale();
            for c in circles {
                let q = scene.to_px(c.center);
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="{}"/>"#, num(q[0]), num(q[1]), num(c.radius / sx));
            }
            out.push_str("</g>\n");
        }
    }
}

/// An SVG 1.1 document with one group per layer, in pixel coordinates.
pub fn render_svg(scene: &Scene) -> Result<String> {
    scene.check()?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = scene.width,
        h = scene.height
    );
    let _ = writeln!(
        out,
        r#"<rect width="{}" height="{}" fill="{}"/>"#,
        scene.width,
        scene.height,
        scene.background.hex()
    );
    for l in scene.layers.iter().filter(|l| !l.is_empty()) {
        layer(&mut out, scene, l);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
