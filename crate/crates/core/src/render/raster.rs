use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::tiling::{TileShape, Tiling};

use super::{default_bar, interval_of, tile_colors, Color, Fill, Layer, LayerSource, Scene};

/// An 8-bit RGB image, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, i: usize, j: usize) -> Color {
        let k = 3 * (j * self.width + i);
        Color(self.data[k], self.data[k + 1], self.data[k + 2])
    }

    /// Binary PPM (P6).
    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.data)?;
        Ok(())
    }
}

/// Per-layer paint: an optional color per pixel, composited with the layer
/// opacity once the layer is complete.
struct Paint {
    width: usize,
    height: usize,
    color: Vec<Option<Color>>,
}

impl Paint {
    fn new(scene: &Scene) -> Self {
        Self {
            width: scene.width,
            height: scene.height,
            color: vec![None; scene.width * scene.height],
        }
    }

    fn set(&mut self, i: i64, j: i64, c: Color) {
        if i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height {
            self.color[j as usize * self.width + i as usize] = Some(c);
        }
    }

    /// Every pixel whose center is within `r` pixels of `q` (at least the pixel holding `q`).
    fn disc(&mut self, q: [f64; 2], r: f64, c: Color) {
        let reach = r.ceil() as i64;
        let (ci, cj) = (q[0].floor() as i64, q[1].floor() as i64);
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let (i, j) = (ci + di, cj + dj);
                let (x, y) = (i as f64 + 0.5 - q[0], j as f64 + 0.5 - q[1]);
                if (di == 0 && dj == 0) || x * x + y * y <= r * r {
                    self.set(i, j, c);
                }
            }
        }
    }

    fn segment(&mut self, a: [f64; 2], b: [f64; 2], r: f64, c: Color) {
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let steps = (len * 4.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            self.disc([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], r, c);
        }
    }
}

fn pixel_center(scene: &Scene, i: usize, j: usize) -> [f64; 2] {
    let (sx, sy) = scene.pixel_scale();
    [
        scene.viewport.min[0] + (i as f64 + 0.5) * sx,
        scene.viewport.max[1] - (j as f64 + 0.5) * sy,
    ]
}

/// Pixel index ranges covering a world box, clipped to the image.
fn pixel_span(scene: &Scene, lo: [f64; 2], hi: [f64; 2]) -> (usize, usize, usize, usize) {
    let a = scene.to_px([lo[0], hi[1]]);
    let b = scene.to_px([hi[0], lo[1]]);
    let clip = |v: f64, n: usize| (v.max(0.0) as usize).min(n);
    (
        clip(a[0].floor(), scene.width),
        clip(b[0].ceil(), scene.width),
        clip(a[1].floor(), scene.height),
        clip(b[1].ceil(), scene.height),
    )
}

fn tiling_paint(scene: &Scene, t: &Tiling, layer: &Layer, paint: &mut Paint) {
    let style = &layer.style;
    let colors = tile_colors(t, style.fill);
    let (sx, _) = scene.pixel_scale();
    let half = 0.5 * style.stroke_width * sx;
    let reach = if style.stroke.is_some() { half } else { 0.0 } + sx;
    let bar = style.bar_height.unwrap_or_else(|| default_bar(t));
    let dim = t.dim();

    // (pixel, world signed distance) per tile, in tile order
    let samples: Vec<Vec<(usize, f64)>> = t
        .tiles()
        .par_iter()
        .map(|tile| {
            let shape = t.shape_of(tile);
            if matches!(shape, TileShape::Cloud { .. }) {
                return Vec::new();
            }
            let (lo, hi) = if dim == 1 {
                let (a, b) = interval_of(t, tile);
                ([a, 0.0], [b, bar])
            } else {
                let b = shape.image_bounds(&tile.transform);
                ([b.min[0], b.min[1]], [b.max[0], b.max[1]])
            };
            let (i0, i1, j0, j1) = pixel_span(scene, [lo[0] - reach, lo[1] - reach], [hi[0] + reach, hi[1] + reach]);
            let inv = tile.transform.invert();
            let ratio = tile.transform.ratio();
            let mut out = Vec::new();
            for j in j0..j1 {
                for i in i0..i1 {
                    let p = pixel_center(scene, i, j);
                    let d = if dim == 1 {
                        let dx = shape.signed_distance(&inv.apply(&p[..1])) * ratio;
                        let dy = p[1].min(bar - p[1]);
                        if dx >= 0.0 && dy >= 0.0 {
                            dx.min(dy)
                        } else {
                            -(dx.min(0.0).powi(2) + dy.min(0.0).powi(2)).sqrt()
                        }
                    } else {
                        shape.signed_distance(&inv.apply(&p)) * ratio
                    };
                    if d >= -reach {
                        out.push((j * scene.width + i, d));
                    }
                }
            }
            out
        })
        .collect();

    let mut edge = vec![false; paint.color.len()];
    for ((tile, color), hits) in t.tiles().iter().zip(&colors).zip(&samples) {
        if let TileShape::Cloud { cloud, .. } = t.shape_of(tile) {
            if let Some(c) = color {
                for p in cloud.points() {
                    let q = tile.transform.apply(p);
                    let w = [q[0], if q.len() > 1 { q[1] } else { 0.0 }];
                    paint.disc(scene.to_px(w), style.point_radius, *c);
                }
            }
            continue;
        }
        for &(k, d) in hits {
            if let (Some(c), true) = (color, d >= 0.0) {
                paint.color[k] = Some(*c);
            }
            if d.abs() <= half {
                edge[k] = true;
            }
        }
    }
    if let Some(stroke) = style.stroke {
        for (k, e) in edge.iter().enumerate() {
            if *e {
                paint.color[k] = Some(stroke);
            }
        }
    }
}

fn layer_paint(scene: &Scene, layer: &Layer) -> Paint {
    let mut paint = Paint::new(scene);
    let style = &layer.style;
    let solid = match style.fill {
        Fill::Solid(c) => Some(c),
        _ => None,
    };
    let line = style.stroke.or(solid).unwrap_or(Color::BLACK);
    let half = 0.5 * style.stroke_width;
    match &layer.source {
        LayerSource::Tiling(t) => tiling_paint(scene, t, layer, &mut paint),
        LayerSource::Cloud(c) => {
            let color = solid.unwrap_or(Color::BLACK);
            for p in c.points() {
                let w = [p[0], if p.len() > 1 { p[1] } else { 0.0 }];
                paint.disc(scene.to_px(w), style.point_radius, color);
            }
        }
        LayerSource::Polylines(lines) => {
            for l in lines {
                for s in l.windows(2) {
                    paint.segment(scene.to_px(s[0]), scene.to_px(s[1]), half, line);
                }
                if l.len() == 1 {
                    paint.disc(scene.to_px(l[0]), half, line);
                }
            }
        }
        LayerSource::Mask(m) => {
            let color = solid.unwrap_or(Color::BLACK);
            let one_d = m.height() == 1;
            let (_, sy) = scene.pixel_scale();
            for j in 0..scene.height {
                for i in 0..scene.width {
                    let p = pixel_center(scene, i, j);
                    let hit = if one_d {
                        p[1].abs() <= 2.0 * sy && m.pixel_of(&p[..1]).is_some_and(|(a, b)| m.is_on(a, b))
                    } else {
                        m.pixel_of(&p).is_some_and(|(a, b)| m.is_on(a, b))
                    };
                    if hit {
                        paint.color[j * scene.width + i] = Some(color);
                    }
                }
            }
        }
        LayerSource::Circles(circles) => {
            let (sx, _) = scene.pixel_scale();
            for c in circles {
                let q = scene.to_px(c.center);
                let r = c.radius / sx;
                let steps = (r * std::f64::consts::TAU * 2.0).ceil().max(8.0) as usize;
                let at = |s: usize| {
                    let a = std::f64::consts::TAU * s as f64 / steps as f64;
                    [q[0] + r * a.cos(), q[1] + r * a.sin()]
                };
                for s in 0..steps {
                    paint.segment(at(s), at(s + 1), half, line);
                }
            }
        }
    }
    paint
}

/// Rasterizes the scene: each layer is painted in full, then blended over
/// the image below with the layer's opacity. Tile edges within half the
/// stroke width take the stroke color, so touching tiles show a shared edge.
pub fn render_raster(scene: &Scene) -> Result<RgbImage> {
    scene.check()?;
    let bg = scene.background;
    let mut acc: Vec<[f64; 3]> = vec![[bg.0 as f64, bg.1 as f64, bg.2 as f64]; scene.width * scene.height];
    for layer in scene.layers.iter().filter(|l| !l.is_empty()) {
        let paint = layer_paint(scene, layer);
        let a = layer.style.opacity.clamp(0.0, 1.0);
        for (dst, src) in acc.iter_mut().zip(&paint.color) {
            if let Some(c) = src {
                for (d, s) in dst.iter_mut().zip([c.0, c.1, c.2]) {
                    *d = a * s as f64 + (1.0 - a) * *d;
                }
            }
        }
    }
    let data = acc.iter().flat_map(|px| px.map(|v| v.round().clamp(0.0, 255.0) as u8)).collect();
    Ok(RgbImage {
        width: scene.width,
        height: scene.height,
        data,
    })
}
