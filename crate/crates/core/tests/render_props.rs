use cotile::render::{render_raster, render_svg, Layer, LayerSource, Scene, Style};
use cotile::tiling::tiling_prefix;
use cotile::{Address, SpecFile, TileShape, Tiling};
use proptest::prelude::*;

fn square_tiling(k: usize, period: Vec<u8>) -> Tiling {
    let spec = SpecFile::builtin("square-4map").unwrap().to_ifs().unwrap();
    let shape = TileShape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let a = Address::periodic(cotile::Word::new(period).unwrap()).unwrap();
    tiling_prefix(&spec, spec.cost_function(), shape, &a.prefix(k)).unwrap()
}

/// Vertex lists of every `<path d="…"/>` element, in pixel coordinates.
fn paths(svg: &str) -> Vec<Vec<[f64; 2]>> {
    svg.split("<path d=\"")
        .skip(1)
        .map(|rest| {
            let d = &rest[..rest.find('"').unwrap()];
            d.split(['M', 'L', 'Z'])
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    let mut it = s.split_whitespace().map(|v| v.parse::<f64>().unwrap());
                    [it.next().unwrap(), it.next().unwrap()]
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn svg_vertices_match_tile_transforms(k in 0usize..3, period in prop::collection::vec(1u8..=4, 1..3)) {
        let t = square_tiling(k, period);
        let scene = Scene::fit(vec![Layer::new(LayerSource::Tiling(t.clone()), Style::default())], 1200).unwrap();
        let svg = render_svg(&scene).unwrap();
        let found = paths(&svg);
        prop_assert_eq!(found.len(), t.len());
        let v = &scene.viewport;
        let (sx, sy) = (v.extent(0) / scene.width as f64, v.extent(1) / scene.height as f64);
        for (tile, verts) in t.tiles().iter().zip(&found) {
            let TileShape::Polygon(poly) = t.shape_of(tile) else { panic!("square tile expected") };
            prop_assert_eq!(verts.len(), poly.len());
            for (p, q) in poly.iter().zip(verts) {
                let want = tile.transform.apply2(*p);
                let got = [v.min[0] + q[0] * sx, v.max[1] - q[1] * sy];
                prop_assert!((want[0] - got[0]).abs() < 1e-6 && (want[1] - got[1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rendering_is_deterministic(k in 0usize..3, period in prop::collection::vec(1u8..=4, 1..3)) {
        let t = square_tiling(k, period);
        let scene = Scene::fit(vec![Layer::new(LayerSource::Tiling(t), Style::default())], 160).unwrap();
        prop_assert_eq!(render_svg(&scene).unwrap(), render_svg(&scene).unwrap());
        prop_assert_eq!(render_raster(&scene).unwrap(), render_raster(&scene).unwrap());
    }
}

// All three Sierpinski maps have ratio ½, so a hexagon patch shows one tile size.
#[test]
fn sierpinski_hexagon_patch_has_one_scale() {
    let spec = SpecFile::builtin("sierpinski").unwrap().to_ifs().unwrap();
    let (cx, cy, r) = (0.5, 3f64.sqrt() / 6.0, 1.0 / 3f64.sqrt());
    let hexagon = TileShape::polygon(
        (0..6)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 3.0;
                [cx + r * a.cos(), cy + r * a.sin()]
            })
            .collect(),
    )
    .unwrap();
    let a: Address = "(12)".parse().unwrap();
    let t = tiling_prefix(&spec, spec.cost_function(), hexagon, &a.prefix(2)).unwrap();
    assert_eq!(cotile::tiling::scale_census(&t).len(), 1);
    let scene = Scene::fit(vec![Layer::new(LayerSource::Tiling(t.clone()), Style::default())], 400).unwrap();
    let found = paths(&render_svg(&scene).unwrap());
    assert_eq!(found.len(), t.len());
    assert!(found.iter().all(|p| p.len() == 6));
}
