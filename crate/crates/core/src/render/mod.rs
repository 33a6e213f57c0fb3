//! Vector and raster pictures of tilings, attractors and central-set boundaries.

mod raster;
mod svg;

use std::sync::Arc;

use crate::attractor::{PointCloud, RasterField, Window};
use crate::centralset::TouchingCircle;
use crate::error::{Error, Result};
use crate::tiling::{scale_census, Tile, Tiling};

pub use raster::{render_raster, RgbImage};
pub use svg::render_svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Color(pub u8, pub u8, pub u8);

impl Color {
    pub const BLACK: Color = Color(0, 0, 0);
    pub const WHITE: Color = Color(255, 255, 255);

    pub fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

const PALETTE: [Color; 10] = [
    Color(0x4e, 0x79, 0xa7),
    Color(0xf2, 0x8e, 0x2b),
    Color(0xe1, 0x57, 0x59),
    Color(0x76, 0xb7, 0xb2),
    Color(0x59, 0xa1, 0x4f),
    Color(0xed, 0xc9, 0x48),
    Color(0xb0, 0x7a, 0xa1),
    Color(0xff, 0x9d, 0xa7),
    Color(0x9c, 0x75, 0x5f),
    Color(0xba, 0xb0, 0xac),
];

/// Palette color for the `n`-th scale class, largest tiles first.
pub fn palette(n: usize) -> Color {
    PALETTE[n % PALETTE.len()]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fill {
    None,
    Solid(Color),
    /// Tiles colored by their size class.
    ByScale,
}

/// Stroke width and point radius are in output pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub fill: Fill,
    pub stroke: Option<Color>,
    pub stroke_width: f64,
    pub opacity: f64,
    pub point_radius: f64,
    /// Height in world units of the bars standing for 1-d tiles.
    pub bar_height: Option<f64>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            fill: Fill::ByScale,
            stroke: Some(Color::BLACK),
            stroke_width: 1.0,
            opacity: 1.0,
            point_radius: 0.5,
            bar_height: None,
        }
    }
}

impl Style {
    pub fn outline(color: Color, width: f64) -> Self {
        Self {
            fill: Fill::None,
            stroke: Some(color),
            stroke_width: width,
            ..Self::default()
        }
    }

    pub fn points(color: Color, radius: f64) -> Self {
        Self {
            fill: Fill::Solid(color),
            stroke: None,
            point_radius: radius,
            ..Self::default()
        }
    }

    pub fn solid(color: Color, opacity: f64) -> Self {
        Self {
            fill: Fill::Solid(color),
            stroke: None,
            opacity,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub enum LayerSource {
    Tiling(Tiling),
    Cloud(Arc<PointCloud>),
    Polylines(Vec<Vec<[f64; 2]>>),
    Mask(RasterField),
    Circles(Vec<TouchingCircle>),
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub source: LayerSource,
    pub style: Style,
}

impl Layer {
    pub fn new(source: LayerSource, style: Style) -> Self {
        Self { source, style }
    }

    fn is_empty(&self) -> bool {
        match &self.source {
            LayerSource::Tiling(t) => t.is_empty(),
            LayerSource::Cloud(c) => c.is_empty(),
            LayerSource::Polylines(p) => p.iter().all(|l| l.is_empty()),
            LayerSource::Mask(m) => m.count_on() == 0,
            LayerSource::Circles(c) => c.is_empty(),
        }
    }

    /// Extent in the picture plane; 1-d data sits on the x axis.
    fn bounds(&self) -> Option<Window> {
        match &self.source {
            LayerSource::Tiling(t) => {
                let b = t.support_bounds()?;
                if b.dim() == 1 {
                    let bar = self.style.bar_height.unwrap_or_else(|| default_bar(t));
                    Window::rect(b.min[0], 0.0, b.max[0], bar).ok()
                } else {
                    Some(b)
                }
            }
            LayerSource::Cloud(c) => {
                let b = c.bounding_box()?;
                if b.dim() == 1 {
                    strip(b.min[0], b.max[0])
                } else {
                    Some(b)
                }
            }
            LayerSource::Polylines(p) => {
                let flat: Vec<f64> = p.iter().flatten().flatten().copied().collect();
                Window::bounding(2, &flat)
            }
            LayerSource::Mask(m) => {
                let w = m.window();
                if w.dim() == 1 {
                    strip(w.min[0], w.max[0])
                } else {
                    Some(w.clone())
                }
            }
            LayerSource::Circles(c) => {
                let flat: Vec<f64> = c
                    .iter()
                    .flat_map(|c| {
                        [
                            c.center[0] - c.radius,
                            c.center[1] - c.radius,
                            c.center[0] + c.radius,
                            c.center[1] + c.radius,
                        ]
                    })
                    .collect();
                Window::bounding(2, &flat)
            }
        }
    }
}

/// A thin box around a stretch of the x axis.
fn strip(lo: f64, hi: f64) -> Option<Window> {
    let h = 0.02 * (hi - lo).max(1e-12);
    Window::rect(lo, -h, hi.max(lo + 1e-12), h).ok()
}

/// Bars a quarter as tall as the mean tile is long.
fn default_bar(t: &Tiling) -> f64 {
    let total: f64 = t
        .tiles()
        .iter()
        .map(|tile| t.shape_of(tile).image_bounds(&tile.transform).extent(0))
        .sum();
    0.25 * total / t.len().max(1) as f64
}

/// Layers drawn in order over a background, with a 2-d viewport mapped onto
/// `width × height` pixels.
#[derive(Clone, Debug)]
pub struct Scene {
    pub layers: Vec<Layer>,
    pub viewport: Window,
    pub width: usize,
    pub height: usize,
    pub background: Color,
}

impl Scene {
    pub fn new(viewport: Window, width: usize, height: usize) -> Result<Self> {
        if viewport.dim() != 2 || (0..2).any(|k| viewport.extent(k).is_nan() || viewport.extent(k) <= 0.0) {
            return Err(Error::InvalidArgument("viewport must be a non-degenerate 2-d box".into()));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("image size must be positive".into()));
        }
        Ok(Self {
            layers: Vec::new(),
            viewport,
            width,
            height,
            background: Color::WHITE,
        })
    }

    /// A scene framing all layers with a 5% margin; the height follows the
    /// aspect ratio of the content.
    pub fn fit(layers: Vec<Layer>, width: usize) -> Result<Self> {
        let b = layers
            .iter()
            .filter(|l| !l.is_empty())
            .filter_map(Layer::bounds)
            .reduce(|a, b| a.union(&b))
            .ok_or(Error::EmptyScene)?;
        let span = b.extent(0).max(b.extent(1)).max(1e-12);
        let viewport = b.expanded(0.05 * span);
        let aspect = viewport.extent(1) / viewport.extent(0);
        let height = ((width as f64 * aspect).round() as usize).max(1);
        let mut scene = Scene::new(viewport, width, height)?;
        scene.layers = layers;
        Ok(scene)
    }

    pub fn push(&mut self, source: LayerSource, style: Style) {
        self.layers.push(Layer::new(source, style));
    }

    fn check(&self) -> Result<()> {
        if self.layers.iter().all(Layer::is_empty) {
            return Err(Error::EmptyScene);
        }
        Ok(())
    }

    /// World units per output pixel along x and y.
    fn pixel_scale(&self) -> (f64, f64) {
        (
            self.viewport.extent(0) / self.width as f64,
            self.viewport.extent(1) / self.height as f64,
        )
    }

    /// Output pixel coordinates of a world point, y pointing down.
    fn to_px(&self, p: [f64; 2]) -> [f64; 2] {
        let (sx, sy) = self.pixel_scale();
        [(p[0] - self.viewport.min[0]) / sx, (self.viewport.max[1] - p[1]) / sy]
    }
}

/// Fill color of each tile: its scale class, largest first.
fn tile_colors(t: &Tiling, fill: Fill) -> Vec<Option<Color>> {
    match fill {
        Fill::None => vec![None; t.len()],
        Fill::Solid(c) => vec![Some(c); t.len()],
        Fill::ByScale => {
            let mut classes = scale_census(t);
            classes.reverse();
            t.tiles()
                .iter()
                .map(|tile| {
                    let s = tile.scale();
                    let n = classes
                        .iter()
                        .enumerate()
                        .min_by(|a, b| (a.1 - s).abs().total_cmp(&(b.1 - s).abs()))
                        .map(|(n, _)| n)
                        .unwrap_or(0);
                    Some(palette(n))
                })
                .collect()
        }
    }
}

/// Image of a 1-d tile as `[lo, hi]`.
fn interval_of(t: &Tiling, tile: &Tile) -> (f64, f64) {
    let b = t.shape_of(tile).image_bounds(&tile.transform);
    (b.min[0], b.max[0])
}
