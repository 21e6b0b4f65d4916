use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::Selection;
use crate::encoding::{free_value, Configuration};
use crate::error::{Error, Result};
use crate::instance::IntervalTpInstance;

/// Roulette probabilities for the fitness-proportional strategies, or
/// `None` for tournament selection.
///
/// When every weight is zero (all fitness values equal, or all zero under
/// `Fps1`) the distribution falls back to uniform.
pub fn selection_probabilities(fitness: &[i64], strategy: Selection) -> Option<Vec<f64>> {
    if fitness.is_empty() {
        return Some(Vec::new());
    }
    let f: Vec<f64> = fitness.iter().map(|&v| v as f64).collect();
    let fmin = f.iter().copied().fold(f64::INFINITY, f64::min);
    let fmax = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = match strategy {
        Selection::Tournament { .. } => return None,
        Selection::Fps1 => f,
        Selection::Fps2 => f.iter().map(|v| v - fmin).collect(),
        Selection::Fps3 { ratio } => {
            // g sets (fmax - g) / (fmin - g) = ratio
            let g = (ratio * fmin - fmax) / (ratio - 1.0);
            f.iter().map(|v| v - g).collect()
        }
    };
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        let p = 1.0 / fitness.len() as f64;
        return Some(vec![p; fitness.len()]);
    }
    Some(weights.iter().map(|w| w / total).collect())
}

/// Draws `count` parents (with replacement). The `elite` fittest members,
/// ties broken by position, are copied first and the rest is sampled.
pub fn select<R: Rng + ?Sized>(
    population: &[Configuration],
    fitness: &[i64],
    strategy: Selection,
    elite: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Configuration>> {
    if population.len() != fitness.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} members but {} fitness values",
            population.len(),
            fitness.len()
        )));
    }
    if population.is_empty() {
        return Err(Error::InvalidParameter("cannot select from an empty population".into()));
    }
    let mut out = Vec::with_capacity(count);
    if elite > 0 {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].cmp(&fitness[a]));
        out.extend(order.iter().take(elite.min(count)).map(|&i| population[i].clone()));
    }
    let rest = count - out.len();
    match strategy {
        Selection::Tournament { size } => {
            if size == 0 {
                return Err(Error::InvalidParameter("tournament size must be positive".into()));
            }
            for _ in 0..rest {
                let mut winner = rng.gen_range(0..population.len());
                for _ in 1..size {
                    let c = rng.gen_range(0..population.len());
                    if fitness[c] > fitness[winner] {
                        winner = c;
                    }
                }
                out.push(population[winner].clone());
            }
        }
        _ => {
            let probs = selection_probabilities(fitness, strategy).expect("roulette strategy");
            let dist = WeightedIndex::new(&probs)
                .map_err(|e| Error::InvalidParameter(format!("selection weights: {e}")))?;
            for _ in 0..rest {
                out.push(population[dist.sample(rng)].clone());
            }
        }
    }
    Ok(out)
}

/// Random index in `0..dim` other than `skip`.
fn index_except<R: Rng + ?Sized>(rng: &mut R, dim: usize, skip: usize) -> usize {
    let r = rng.gen_range(0..dim - 1);
    if r >= skip {
        r + 1
    } else {
        r
    }
}

/// Mutation.
///
/// Unbalanced input: the sign at a uniform position other than the free one
/// is flipped.
///
/// Balanced input: the free position `k` is pinned to one of its bounds and a
/// new free position `i` is chosen so the result stays balanced. The bound
/// is picked uniformly among those admitting at least one such `i`, then `i`
/// uniformly among the admissible positions. If neither bound works, a flip
/// that keeps balance is tried instead, and if none exists the input is
/// returned unchanged. Inputs of dimension 1 have nothing to mutate.
pub fn mutate<R: Rng + ?Sized>(
    inst: &IntervalTpInstance,
    config: &Configuration,
    rng: &mut R,
) -> Result<Configuration> {
    config.check_dim(inst)?;
    let dim = config.len();
    let k = config.free_index();
    if dim < 2 {
        return Ok(config.clone());
    }
    if !free_value(inst, config).balanced {
        return Ok(config.flipped(index_except(rng, dim, k)));
    }
    let admissible = |sign: i8| -> Vec<usize> {
        (0..dim)
            .filter(|&i| i != k && free_value(inst, &config.with_free_moved(i, sign)).balanced)
            .collect()
    };
    let low = admissible(-1);
    let high = admissible(1);
    let (sign, choices) = match (low.is_empty(), high.is_empty()) {
        (false, false) => {
            if rng.gen_bool(0.5) {
                (-1, low)
            } else {
                (1, high)
            }
        }
        (false, true) => (-1, low),
        (true, false) => (1, high),
        (true, true) => {
            let flips: Vec<usize> = (0..dim)
                .filter(|&i| i != k && free_value(inst, &config.flipped(i)).balanced)
                .collect();
            if flips.is_empty() {
                return Ok(config.clone());
            }
            let i = flips[rng.gen_range(0..flips.len())];
            return Ok(config.flipped(i));
        }
    };
    let i = choices[rng.gen_range(0..choices.len())];
    Ok(config.with_free_moved(i, sign))
}

/// Uniform crossover that keeps exactly one free position.
///
/// With `k` and `l` the parents' free positions, a coin decides whether the
/// child is free at `k` (taking the first parent's sign at `l`) or free at
/// `l` (taking the second parent's sign at `k`). All other positions come
/// from either parent with equal probability. The coin is drawn even when
/// `k == l`, so the stream consumed depends only on the dimension.
pub fn crossover<R: Rng + ?Sized>(
    a: &Configuration,
    b: &Configuration,
    rng: &mut R,
) -> Result<Configuration> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "parents have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (k, l) = (a.free_index(), b.free_index());
    let (sa, sb) = (a.signs(), b.signs());
    let free_at_k = rng.gen_bool(0.5);
    let mut z = vec![0i8; a.len()];
    for i in 0..z.len() {
        if i == k || i == l {
            continue;
        }
        z[i] = if rng.gen_bool(0.5) { sa[i] } else { sb[i] };
    }
    if k != l {
        if free_at_k {
            z[l] = sa[l];
        } else {
            z[k] = sb[k];
        }
    }
    Configuration::new(z)
}
