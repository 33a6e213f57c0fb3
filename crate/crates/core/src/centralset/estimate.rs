use crate::attractor::{
    attractor_hull, chaos_game, distance_field_from_tree, KdTree, PointCloud, Provenance, RasterField, Window, DEFAULT_BURN_IN,
    DEFAULT_POINTS,
};
use crate::error::{Error, Result};
use crate::geometry::{dedup_similitudes, IfsSpec, Similitude};
use crate::neighbors::{basin_generators, thinned_images, DEFAULT_NEIGHBOR_DEPTH, NEIGHBOR_TOLERANCE};

/// Margins at or below this are boundary, not interior.
pub const MARGIN_EPSILON: f64 = 1e-12;

/// Masks with fewer on pixels than this fraction of the grid raise the
/// open-set-condition warning.
pub const NEAR_EMPTY_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct CentralSetParams {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub neighbor_depth: usize,
    pub points: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl CentralSetParams {
    pub fn new(window: Window, width: usize, height: usize) -> Self {
        Self {
            window,
            width,
            height,
            neighbor_depth: DEFAULT_NEIGHBOR_DEPTH,
            points: DEFAULT_POINTS,
            burn_in: DEFAULT_BURN_IN,
            seed: 0,
        }
    }

    /// A square grid of `resolution` pixels per side (one row in 1-d) on
    /// [`default_window`].
    pub fn for_spec(spec: &IfsSpec, resolution: usize) -> Result<Self> {
        let window = default_window(spec)?;
        let height = if spec.dim() == 1 { 1 } else { resolution };
        Ok(Self::new(window, resolution, height))
    }
}

/// The attractor's bounding box, made square and enlarged by half. A
/// single-point attractor gets a unit square about the point.
pub fn default_window(spec: &IfsSpec) -> Result<Window> {
    let b = attractor_hull(spec)?.bounding_box().squared();
    if b.extent(0) > 0.0 {
        return Ok(b.scaled(1.5));
    }
    let c = b.center();
    Window::new(c.iter().map(|v| v - 0.5).collect(), c.iter().map(|v| v + 0.5).collect())
}

/// Raster estimate of `C = {x : d(x,A) < d(x,H)}`.
#[derive(Clone, Debug)]
pub struct CentralSetEstimate {
    pub mask: RasterField,
    pub d_a: RasterField,
    pub d_h: RasterField,
    pub margin: RasterField,
    pub neighbor_depth: usize,
    /// The attractor sample that `d_a` measures against.
    pub attractor: PointCloud,
    /// The sample of `H` near the window that `d_h` measures against.
    pub basin: PointCloud,
    /// The mask reaches the window edge, so `C` may extend beyond it.
    pub unbounded_suspected: bool,
    /// The mask is empty or nearly so, as happens when the open set
    /// condition fails.
    pub osc_warning: bool,
}

impl CentralSetEstimate {
    pub fn area(&self) -> f64 {
        self.mask.count_on() as f64 * self.mask.pixel_measure()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.count_on() == 0
    }
}

/// Estimates the central open set on a grid.
///
/// `A` is sampled by the chaos game and thinned to a quarter pixel. `H` is
/// the union of `h(A)` over the maps `f_i⁻¹ f_{j₁}` with `|i| ≤ depth`,
/// which has the same union as the full neighbor set of that depth. Each
/// such `h` is refined into pieces `h ∘ f_w` of ratio at most one, so that
/// the image of the sample stays as dense as the sample itself; pieces
/// farther from the window than `max d(·,A)` cannot change the comparison
/// and are skipped.
pub fn estimate_central_set(spec: &IfsSpec, params: &CentralSetParams) -> Result<CentralSetEstimate> {
    let window = &params.window;
    if window.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: window.dim(),
        });
    }
    let grid = RasterField::new(window.clone(), params.width, params.height)?;
    let px = if spec.dim() == 1 {
        grid.pixel_size()
    } else {
        grid.pixel_size().max(window.extent(1) / params.height as f64)
    };
    let cell = px / 4.0;

    let cloud = chaos_game(spec, params.points, params.burn_in, params.seed)?;
    let bbox = cloud.bounding_box().ok_or(Error::Empty("attractor cloud"))?;
    if !bbox.intersects(window) {
        return Err(Error::InvalidArgument("window does not meet the attractor".into()));
    }
    let attractor = cloud.thinned(cell);
    let tree_a = KdTree::build(&attractor);
    let d_a = distance_field_from_tree(&tree_a, window, params.width, params.height)?;
    let reach = d_a.max_finite() + px;

    let pieces = basin_pieces(spec, params.neighbor_depth, &attractor, window, reach)?;
    let coords = thinned_images(&pieces, &attractor, window, reach, cell);
    let basin = PointCloud::new(
        spec.dim(),
        coords,
        Provenance {
            generator: format!("neighbor images at depth {}", params.neighbor_depth),
            seed: Some(params.seed),
            count: pieces.len(),
            burn_in: 0,
        },
    )?;
    let d_h = if basin.is_empty() {
        RasterField::filled(window.clone(), params.width, params.height, f64::INFINITY)?
    } else {
        distance_field_from_tree(&KdTree::build(&basin), window, params.width, params.height)?
    };

    let mut margin = d_a.clone();
    for (m, (&h, &a)) in margin.samples_mut().iter_mut().zip(d_h.samples().iter().zip(d_a.samples())) {
        *m = h - a;
    }
    let mask = margin.map(|m| if m > MARGIN_EPSILON { 1.0 } else { 0.0 });
    let on = mask.count_on();
    let osc_warning = (on as f64) < NEAR_EMPTY_FRACTION * mask.len() as f64 || on == 0;
    let unbounded_suspected = touches_edge(&mask);
    Ok(CentralSetEstimate {
        mask,
        d_a,
        d_h,
        margin,
        neighbor_depth: params.neighbor_depth,
        attractor,
        basin,
        unbounded_suspected,
        osc_warning,
    })
}

/// Maps `h ∘ f_w` with ratio at most one whose images of `A` cover the part
/// of `H` within `reach` of the window.
fn basin_pieces(spec: &IfsSpec, depth: usize, attractor: &PointCloud, window: &Window, reach: f64) -> Result<Vec<Similitude>> {
    let gens = basin_generators(spec, depth)?;
    let bbox = attractor.bounding_box().ok_or(Error::Empty("attractor cloud"))?;
    let c = bbox.center();
    let r = 0.5 * bbox.diagonal();
    let mut leaves = Vec::new();
    if gens.identities_excluded() > 0 {
        // a coincidence f_i = f_j puts all of A inside H
        leaves.push(Similitude::identity(spec.dim()));
    }
    let mut stack: Vec<Similitude> = gens.similitudes();
    while let Some(g) = stack.pop() {
        if window.distance_to(&g.apply(&c)) - g.ratio() * r > reach {
            continue;
        }
        if g.ratio() <= 1.0 + 1e-12 {
            leaves.push(g);
            continue;
        }
        for f in spec.maps() {
            stack.push(g.compose(f)?);
        }
    }
    let tol = NEIGHBOR_TOLERANCE * (1.0 + bbox.diagonal());
    let reps = dedup_similitudes(&leaves, tol);
    Ok(leaves
        .into_iter()
        .enumerate()
        .filter(|(k, _)| reps[*k] == *k)
        .map(|(_, g)| g)
        .collect())
}

fn touches_edge(mask: &RasterField) -> bool {
    let (w, h) = (mask.width(), mask.height());
    if h == 1 {
        return mask.is_on(0, 0) || mask.is_on(w - 1, 0);
    }
    (0..w).any(|i| mask.is_on(i, 0) || mask.is_on(i, h - 1)) || (0..h).any(|j| mask.is_on(0, j) || mask.is_on(w - 1, j))
}
