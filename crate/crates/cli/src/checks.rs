use anyhow::{bail, Context, Result};
use cotile::centralset::{estimate_central_set, feasibility_check, CentralSetParams};
use cotile::geometry::CostFunction;
use cotile::tiling::{
    canonical_relation_check, canonical_tiling, commensurability, overlap_report, scale_census, shift_equivalence_check, tiling_prefix,
    tiling_sequence, Commensurability,
};
use cotile::{Address, Error, IfsSpec, TileShape, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::load_spec;
use crate::{shapes, Expectation, Outcome, ShapeArgs, SpecArgs, Suite};

pub struct CheckOptions {
    pub suite: Suite,
    pub address: String,
    pub k: usize,
    pub resolution: usize,
    pub trials: usize,
    pub i: Option<String>,
    pub j: Option<String>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub canonical: bool,
    pub expect: Option<Expectation>,
}

fn verdict(pass: bool) -> Outcome {
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn parse_address(s: &str, spec: &IfsSpec) -> Result<Address> {
    let a: Address = s.parse().with_context(|| format!("bad address {s:?}"))?;
    a.validate(spec.len())?;
    Ok(a)
}

pub fn run(args: &SpecArgs, shape_args: &ShapeArgs, o: CheckOptions) -> Result<Outcome> {
    let (file, spec) = load_spec(args)?;
    let address = parse_address(&o.address, &spec)?;
    match o.suite {
        Suite::Nesting => {
            let shape = shapes::resolve(&file, &spec, shape_args)?;
            if o.trials == 0 {
                return nesting_one(&spec, spec.cost_function(), shape, &address, o.k);
            }
            let Some(seed) = shape_args.seed else {
                bail!("--seed is required with --trials");
            };
            nesting_random(&spec, shape, o.trials, o.k, seed)
        }
        Suite::Overlap => {
            let shape = shapes::resolve(&file, &spec, shape_args)?;
            let t = tiling_prefix(&spec, spec.cost_function(), shape, &address.prefix(o.k))?;
            let r = overlap_report(&t, o.resolution)?;
            let total: f64 = r.pairs.iter().map(|p| p.overlap).sum();
            println!("tiles: {}", r.tiles);
            println!("touching pairs: {}", r.touching());
            println!("overlapping pairs: {}", r.overlapping());
            println!("overlap measure: {total}");
            Ok(verdict(r.overlapping() == 0))
        }
        Suite::Feasibility => {
            let Some(seed) = shape_args.seed else {
                bail!("--seed is required for the feasibility suite");
            };
            let mut params = CentralSetParams::for_spec(&spec, shape_args.grid)?;
            params.neighbor_depth = shape_args.depth;
            params.points = shape_args.points;
            params.seed = seed;
            let c = estimate_central_set(&spec, &params)?;
            let report = feasibility_check(&spec, &c);
            println!("mask pixels: {}", report.mask_pixels);
            println!(
                "containment violations: {} ({} beyond band)",
                report.containment_violations, report.containment_beyond_band
            );
            println!(
                "overlapping pairs: {}",
                report.overlaps.iter().filter(|p| p.beyond_band > 0).count()
            );
            println!("{}", report.verdict());
            Ok(verdict(report.passed))
        }
        Suite::ShiftEquivalence => {
            let (Some(i), Some(j), Some(p), Some(q)) = (&o.i, &o.j, o.p, o.q) else {
                bail!("the shift-equivalence suite needs --i, --j, --p and --q");
            };
            let (i, j) = (parse_address(i, &spec)?, parse_address(j, &spec)?);
            let shape = shapes::resolve(&file, &spec, shape_args)?;
            match shift_equivalence_check(&spec, spec.cost_function(), shape, &i, &j, p, q, o.k) {
                Ok(e) => {
                    println!("E: linear {:?} translation {:?}", e.linear(), e.translation());
                    Ok(verdict(true))
                }
                Err(Error::SetMismatch(msg)) => {
                    println!("{msg}");
                    Ok(verdict(false))
                }
                Err(e) => Err(e.into()),
            }
        }
        Suite::CanonicalRelation => {
            let shape = shapes::resolve(&file, &spec, shape_args)?;
            let mut pass = true;
            for k in 0..=o.k {
                let ok = canonical_relation_check(&spec, &address, k, shape.clone())?;
                println!("k={k}: {}", if ok { "holds" } else { "fails" });
                pass &= ok;
            }
            Ok(verdict(pass))
        }
        Suite::Commensurability => {
            let shape = shapes::resolve(&file, &spec, shape_args)?;
            let t = if o.canonical {
                canonical_tiling(&spec, u32::try_from(o.k)?, shape)?
            } else {
                tiling_prefix(&spec, spec.cost_function(), shape, &address.prefix(o.k))?
            };
            let c = commensurability(&t);
            println!("tiles: {}", t.len());
            println!("distinct scales: {}", scale_census(&t).len());
            match &c {
                Commensurability::Commensurate { ratio } => println!("commensurate: ratio {ratio:.12}"),
                Commensurability::Incommensurate => println!("incommensurate"),
                Commensurability::TooFewTiles => println!("too few tiles to classify"),
            }
            Ok(match o.expect {
                None => Outcome::Pass,
                Some(Expectation::Commensurate) => verdict(c.is_commensurate()),
                Some(Expectation::Incommensurate) => verdict(c == Commensurability::Incommensurate),
            })
        }
    }
}

fn nesting_one(spec: &IfsSpec, cf: &CostFunction, shape: TileShape, address: &Address, k: usize) -> Result<Outcome> {
    match tiling_sequence(spec, cf, shape, address, k) {
        Ok(seq) => {
            let counts: Vec<String> = seq.iter().map(|t| t.len().to_string()).collect();
            println!("tile counts: {}", counts.join(" "));
            Ok(verdict(true))
        }
        Err(Error::NestingViolation { lower, upper }) => {
            println!("Π(i|{lower}) is not contained in Π(i|{upper})");
            Ok(verdict(false))
        }
        Err(e) => Err(e.into()),
    }
}

/// Random costs in [0.5, 2] and random eventually periodic addresses.
fn nesting_random(spec: &IfsSpec, shape: TileShape, trials: usize, k: usize, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = spec.len() as u8;
    let mut violations = 0;
    for n in 0..trials {
        let costs: Vec<f64> = (0..spec.len()).map(|_| rng.gen_range(0.5..2.0)).collect();
        let cf = CostFunction::new(costs)?;
        let mut word = |len: usize| Word::new((0..len).map(|_| rng.gen_range(1..=m)).collect());
        let pre = word(n % 3)?;
        let period = word(1 + n % 2)?;
        let address = Address::new(pre, period)?;
        if let Err(e) = tiling_sequence(spec, &cf, shape.clone(), &address, k) {
            match e {
                Error::NestingViolation { lower, upper } => {
                    violations += 1;
                    println!("trial {n}: address {address}, costs {:?}: Π(i|{lower}) ⊄ Π(i|{upper})", cf.costs());
                }
                other => return Err(other.into()),
            }
        }
    }
    println!("trials: {trials}, violations: {violations}");
    Ok(verdict(violations == 0))
}
