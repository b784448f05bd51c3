#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use treegini::experiments::oracle::{
    brute_force_bst, brute_force_caterpillar, brute_force_pyramid, exact_to_f64, CaterpillarRule,
};
use treegini::{run_monte_carlo, GiniVariant, Parallelism, Scenario, TreeClass};

pub const ALPHA: f64 = 0.001;

/// Pools categories in the given order so that every pooled cell has
/// expected count at least 5.
fn pool(observed: &[f64], expected: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (mut obs, mut exp) = (Vec::new(), Vec::new());
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        o_acc += o;
        e_acc += e;
        if e_acc >= 5.0 {
            obs.push(o_acc);
            exp.push(e_acc);
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match (obs.last_mut(), exp.last_mut()) {
            (Some(o), Some(e)) => {
                *o += o_acc;
                *e += e_acc;
            }
            _ => {
                obs.push(o_acc);
                exp.push(e_acc);
            }
        }
    }
    (obs, exp)
}

fn chi_square_sf(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).unwrap().sf(stat)
}

/// Pearson goodness-of-fit p-value of `counts` against `probs`. Mass not
/// covered by `probs` is expected in an extra tail cell.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let n = total as f64;
    let mut obs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut exp: Vec<f64> = probs.iter().map(|p| p * n).collect();
    obs.resize(exp.len().max(obs.len()), 0.0);
    exp.resize(obs.len(), 0.0);
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0) * n;
    if tail > 1e-9 {
        obs.push(0.0);
        exp.push(tail);
    }
    let (obs, exp) = pool(&obs, &exp);
    let stat: f64 = obs.iter().zip(&exp).map(|(o, e)| (o - e) * (o - e) / e).sum();
    chi_square_sf(stat, obs.len().saturating_sub(1))
}

/// Two-sample chi-square homogeneity p-value over shared categories.
pub fn chi_square_two_sample<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> f64 {
    let keys: Vec<K> = a.keys().chain(b.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let na: f64 = a.values().sum::<u64>() as f64;
    let nb: f64 = b.values().sum::<u64>() as f64;
    let mut cells = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in &keys {
        ca += *a.get(k).unwrap_or(&0) as f64;
        cb += *b.get(k).unwrap_or(&0) as f64;
        if (ca + cb) * na.min(nb) / (na + nb) >= 5.0 {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    let total = na + nb;
    let mut stat = 0.0;
    for &(x, y) in &cells {
        let col = x + y;
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (x - ea).powi(2) / ea + (y - eb).powi(2) / eb;
    }
    chi_square_sf(stat, cells.len().saturating_sub(1))
}

pub fn tally<K: Ord, I: IntoIterator<Item = K>>(items: I) -> BTreeMap<K, u64> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Asymptotic Kolmogorov tail probability with the usual small-sample
/// correction of the argument.
fn kolmogorov_sf(d: f64, ne: f64) -> f64 {
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov p-value.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    kolmogorov_sf(d, n)
}

/// Two-sample Kolmogorov-Smirnov p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    kolmogorov_sf(d, na * nb / (na + nb))
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// `exp(M t)` for a 2x2 matrix by scaling and squaring a Taylor series.
pub fn expm2(m: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let norm = m.iter().flatten().map(|x| x.abs()).sum::<f64>() * t.abs();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let h = t / f64::from(2u32.pow(squarings));
    let a = [[m[0][0] * h, m[0][1] * h], [m[1][0] * h, m[1][1] * h]];
    let mut result = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = result;
    for k in 1..30 {
        term = mul(term, a);
        let f = 1.0 / k as f64;
        term = [[term[0][0] * f, term[0][1] * f], [term[1][0] * f, term[1][1] * f]];
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul(result, result);
    }
    result
}

/// Mean ball counts of a continuous-time urn with replacement matrix `a`
/// (rows: drawn color) started at `(w0, b0)`.
pub fn urn_mean(a: [[i64; 2]; 2], w0: f64, b0: f64, t: f64) -> (f64, f64) {
    let at = [[a[0][0] as f64, a[1][0] as f64], [a[0][1] as f64, a[1][1] as f64]];
    let e = expm2(at, t);
    (e[0][0] * w0 + e[0][1] * b0, e[1][0] * w0 + e[1][1] * b0)
}

/// Monte Carlo against exhaustive enumeration for one class and horizon.
/// Returns `(exact, mean, se)`.
pub fn oracle_agreement(class: TreeClass, n: u64, spine: u64, reps: u64, seed: u64) -> (f64, f64, f64) {
    let exact = match class {
        TreeClass::Bst => brute_force_bst(n),
        TreeClass::Pyramid => brute_force_pyramid(n),
        TreeClass::CaterpillarUniform => brute_force_caterpillar(CaterpillarRule::Uniform, spine, n),
        TreeClass::CaterpillarPa => brute_force_caterpillar(CaterpillarRule::Preferential, spine, n),
    }
    .unwrap();
    let rec = run_monte_carlo(
        &Scenario::discrete(class, n, spine),
        GiniVariant::Topological,
        reps,
        seed,
        Parallelism::default(),
    )
    .unwrap();
    (exact_to_f64(&exact), rec.mean, rec.se)
}

pub fn within_3se(exact: f64, mean: f64, se: f64) -> bool {
    (mean - exact).abs() <= 3.0 * se + 1e-12
}
