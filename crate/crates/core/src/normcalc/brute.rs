//! Grid-and-polish oracle over the unit sphere of a small domain.

use std::f64::consts::PI;

use super::attain::{cluster_orbits, Candidate};
use super::{NormMethod, NormResult};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linops::{OperatorTuple, StackedOperator};
use crate::spaces::{lp_norm_slice, Exponent, Field, LpSpace, Vector, C64};

const POLISHED: usize = 12;
const FAN: usize = 32;

/// Angular coordinates of the Euclidean sphere, pushed radially onto the
/// ℓ_p sphere.
fn point(space: LpSpace, t: &[f64]) -> Vec<C64> {
    let u: Vec<C64> = match (space.field, space.dim) {
        (_, 1) => vec![C64::new(1.0, 0.0)],
        (Field::Real, 2) => vec![C64::new(t[0].cos(), 0.0), C64::new(t[0].sin(), 0.0)],
        (Field::Real, 3) => vec![
            C64::new(t[0].sin() * t[1].cos(), 0.0),
            C64::new(t[0].sin() * t[1].sin(), 0.0),
            C64::new(t[0].cos(), 0.0),
        ],
        (Field::Complex, 2) => vec![C64::new(t[0].cos(), 0.0), C64::from_polar(t[0].sin(), t[1])],
        _ => unreachable!("dimension checked by the caller"),
    };
    let n = lp_norm_slice(space.p, &u);
    u.into_iter().map(|z| z / n).collect()
}

fn grid(space: LpSpace, density: usize) -> Vec<Vec<f64>> {
    let g = density.max(4);
    match (space.field, space.dim) {
        (_, 1) => vec![vec![]],
        (Field::Real, 2) => (0..g).map(|i| vec![PI * i as f64 / g as f64]).collect(),
        _ => {
            let rings = g / 2 + 1;
            let around = 2 * g;
            let mut pts = Vec::with_capacity(rings * around);
            for i in 0..rings {
                let a = 0.5 * PI * i as f64 / (rings - 1) as f64;
                for j in 0..around {
                    pts.push(vec![a, 2.0 * PI * j as f64 / around as f64]);
                }
            }
            pts
        }
    }
}

/// Poll directions in angle space. In two angles the fan is rotated by
/// `turn` so that successive contractions probe new headings along ridges.
fn directions(k: usize, turn: f64) -> Vec<Vec<f64>> {
    match k {
        0 => vec![],
        1 => vec![vec![1.0], vec![-1.0]],
        _ => (0..FAN)
            .map(|j| {
                let a = 2.0 * PI * (j as f64 + turn) / FAN as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
    }
}

/// Compass search in angle space.
fn polish(f: &dyn Fn(&[f64]) -> f64, start: Vec<f64>, step: f64) -> (f64, Vec<f64>) {
    let mut turn = 0.0;
    let mut dirs = directions(start.len(), turn);
    let mut t = start;
    let mut val = f(&t);
    let mut h = step;
    let mut iters = 0;
    while h > 1e-13 && iters < 20_000 {
        iters += 1;
        let mut moved = false;
        for d in &dirs {
            let cand: Vec<f64> = t.iter().zip(d).map(|(a, b)| a + h * b).collect();
            let v = f(&cand);
            if v > val {
                val = v;
                t = cand;
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
            turn = (turn + 0.618_033_988_75) % 1.0;
            dirs = directions(t.len(), turn);
        }
    }
    (val, t)
}

/// Angles of the vertices of the real ℓ_1 and ℓ_∞ balls, where a convex
/// function on the ball peaks.
fn vertices(space: LpSpace) -> Vec<Vec<f64>> {
    if space.field != Field::Real || space.dim < 2 || !(space.p.is_one() || space.p.is_infinite()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let n = space.dim;
    let codes: Vec<Vec<f64>> = if space.p.is_one() {
        (0..n).flat_map(|i| [1.0, -1.0].map(|s| (0..n).map(|k| if k == i { s } else { 0.0 }).collect())).collect()
    } else {
        (0..1usize << n).map(|m| (0..n).map(|k| if m >> k & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
    };
    for v in codes {
        out.push(match n {
            2 => vec![v[1].atan2(v[0])],
            _ => {
                let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                vec![(v[2] / r).acos(), v[1].atan2(v[0])]
            }
        });
    }
    out
}

/// Euclidean distance between the directions of `x` and `±y` (real) or the
/// closest phase multiple (complex); `ux` is `‖x‖_2`.
fn orbit_gap(x: &[C64], y: &[C64], ux: f64) -> f64 {
    let uy = lp_norm_slice(Exponent::TWO, y);
    let inner: C64 = x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
    let c = (inner.norm() / (ux * uy)).min(1.0);
    (2.0 - 2.0 * c).max(0.0).sqrt()
}

/// Dense-grid maximization of `‖𝒯x‖` over the unit sphere, refined by a
/// local compass search from the best grid points. `grid_density` is the
/// number of samples per half turn of each angle.
pub fn brute_force_norm(t: &OperatorTuple, grid_density: usize) -> Result<NormResult> {
    let space = t.domain();
    let limit = match space.field {
        Field::Real => 3,
        Field::Complex => 2,
    };
    if space.dim > limit {
        return Err(Error::DimensionTooLarge { dim: space.dim });
    }
    let a: StackedOperator = t.stacked();
    let f = |th: &[f64]| a.image_norm(&point(space, th));
    let mut scored: Vec<(f64, Vec<f64>)> = grid(space, grid_density).into_iter().map(|th| (f(&th), th)).collect();
    let evaluated = scored.len();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let step = PI / grid_density.max(4) as f64;
    let corners = vertices(space);
    // best grid points first, skipping neighbours of points already taken so
    // that separate local maxima each get a start
    let sep = 2.5 * step;
    let mut starts: Vec<(Vec<f64>, Vec<C64>)> = Vec::with_capacity(POLISHED);
    for (_, th) in scored {
        if starts.len() == POLISHED {
            break;
        }
        let x = point(space, &th);
        let u = lp_norm_slice(Exponent::TWO, &x);
        if starts.iter().all(|(_, y)| orbit_gap(&x, y, u) > sep) {
            starts.push((th, x));
        }
    }
    let cands: Vec<Candidate> = starts
        .into_iter()
        .map(|(th, _)| th)
        .chain(corners)
        .map(|th| {
            let (value, th) = polish(&f, th, step);
            Candidate { value, x: point(space, &th), hits: 1 }
        })
        .collect();
    let cfg = Config::default();
    let best = cands.iter().map(|c| c.value).fold(0.0, f64::max);
    let orbits = cluster_orbits(space, cands, best - cfg.tau_attain, cfg.delta_sep, 64);
    let complete = orbits.iter().all(|o| o.hits >= 2);
    let residual = orbits.iter().map(|o| best - o.value).fold(0.0, f64::max);
    Ok(NormResult {
        value: best,
        witnesses: orbits.into_iter().map(|o| Vector::from_parts(space, o.x)).collect(),
        method: NormMethod::BruteForce,
        residual,
        starts_used: evaluated,
        complete,
    })
}
