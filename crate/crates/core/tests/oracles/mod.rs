//! Brute-force reference computations for the integration and acceptance
//! tests. Nothing here calls into the library's numeric routines.

#![allow(dead_code)]

use rand::Rng;

/// Averaged frequencies by sorting the raw sample and counting: for rank
/// `l`, (#values below l + half of #values equal to l) / N.
pub fn sorted_count_averages(sample: &[u32], levels: usize) -> Vec<f64> {
    let mut sorted = sample.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    (1..=levels as u32)
        .map(|l| {
            let below = sorted.partition_point(|&v| v < l);
            let upto = sorted.partition_point(|&v| v <= l);
            (below as f64 + 0.5 * (upto - below) as f64) / n
        })
        .collect()
}

/// Closed form Σ_{t<l} f_t + f_l / 2 over given frequencies.
pub fn closed_form_averages(freqs: &[f64]) -> Vec<f64> {
    (0..freqs.len())
        .map(|l| freqs[..l].iter().sum::<f64>() + 0.5 * freqs[l])
        .collect()
}

/// The three-case asymmetric membership function, written out directly.
pub fn membership(mode: f64, x: f64) -> f64 {
    let v = if mode > 0.5 {
        if x >= 0.0 && x <= mode {
            x / mode
        } else {
            (2.0 * mode - x) / mode
        }
    } else if mode < 0.5 {
        if x >= mode && x <= 1.0 {
            (1.0 - x) / (1.0 - mode)
        } else {
            (x - 2.0 * mode + 1.0) / (1.0 - mode)
        }
    } else if x <= mode {
        x / mode
    } else {
        (1.0 - x) / (1.0 - mode)
    };
    v.clamp(0.0, 1.0)
}

/// Random `n × c` row-stochastic matrix as nested rows.
pub fn random_stochastic<R: Rng>(rng: &mut R, n: usize, c: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let row: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

/// Σ_i Σ_j w_ij^β D_ij with `w` as `N × c` rows and `d` as `c × N` rows.
pub fn weighted_sum(w: &[Vec<f64>], d: &[Vec<f64>], beta: f64) -> f64 {
    let mut q = 0.0;
    for (j, row) in w.iter().enumerate() {
        for (i, &wij) in row.iter().enumerate() {
            q += wij.powf(beta) * d[i][j];
        }
    }
    q
}

/// Every crisp 2-partition (both sides non-empty) with observation 0 on side
/// 0, so each unordered split appears once.
pub fn two_partitions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    assert!(n <= 20);
    (0u32..(1 << (n - 1)))
        .map(move |mask| {
            let mut a = vec![0usize; n];
            for (j, slot) in a.iter_mut().enumerate().skip(1) {
                *slot = ((mask >> (j - 1)) & 1) as usize;
            }
            a
        })
        .filter(|a| a.contains(&1))
}

/// Crisp 2-partitions of ordinal rows maximising Σ_j L(assign(j), j), where
/// each cluster's prototype is its per-feature crisp mode of the averaged
/// frequencies (ties to the smaller value) and L is the product of
/// membership values floored at `p_floor`.
pub fn best_likelihood_partitions(ranks: &[Vec<u32>], levels: usize, p_floor: f64) -> (f64, Vec<Vec<usize>>) {
    let n = ranks.len();
    let n_features = ranks[0].len();
    let averaged: Vec<Vec<f64>> = (0..n_features)
        .map(|k| {
            let col: Vec<u32> = ranks.iter().map(|r| r[k]).collect();
            sorted_count_averages(&col, levels)
        })
        .collect();
    let x: Vec<Vec<f64>> = ranks
        .iter()
        .map(|r| r.iter().enumerate().map(|(k, &l)| averaged[k][l as usize - 1]).collect())
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut winners = Vec::new();
    for assign in two_partitions(n) {
        let mut q = 0.0;
        for side in 0..2 {
            let members: Vec<usize> = (0..n).filter(|&j| assign[j] == side).collect();
            let modes: Vec<f64> = (0..n_features)
                .map(|k| {
                    let mut counts: Vec<(f64, usize)> = Vec::new();
                    for &j in &members {
                        match counts.iter_mut().find(|(v, _)| *v == x[j][k]) {
                            Some((_, c)) => *c += 1,
                            None => counts.push((x[j][k], 1)),
                        }
                    }
                    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.total_cmp(&b.0)));
                    counts[0].0
                })
                .collect();
            for &j in &members {
                q += (0..n_features)
                    .map(|k| membership(modes[k], x[j][k]).max(p_floor))
                    .product::<f64>();
            }
        }
        if q > best + 1e-12 {
            best = q;
            winners = vec![assign];
        } else if (q - best).abs() <= 1e-12 {
            winners.push(assign);
        }
    }
    (best, winners)
}

/// Crisp 2-partitions of 1-D points minimising the within-cluster sum of
/// squares (crisp FCM objective).
pub fn best_sse_partitions(points: &[f64]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut winners = Vec::new();
    for assign in two_partitions(n) {
        let mut q = 0.0;
        for side in 0..2 {
            let members: Vec<f64> = (0..n).filter(|&j| assign[j] == side).map(|j| points[j]).collect();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            q += members.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        }
        if q < best - 1e-12 {
            best = q;
            winners = vec![assign];
        } else if (q - best).abs() <= 1e-12 {
            winners.push(assign);
        }
    }
    winners
}

/// Relabels a 2-cluster assignment so observation 0 is in cluster 0.
pub fn canonical_two(assign: &[usize]) -> Vec<usize> {
    if assign[0] == 0 {
        assign.to_vec()
    } else {
        assign.iter().map(|&a| 1 - a).collect()
    }
}

/// Fraction matched under the best label permutation, by enumerating
/// permutations of `0..k` recursively.
pub fn permutation_accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    let k = predicted.iter().chain(truth).max().map_or(1, |m| m + 1);
    fn go(pos: usize, k: usize, used: &mut Vec<bool>, map: &mut Vec<usize>, p: &[usize], t: &[usize], best: &mut usize) {
        if pos == k {
            let hits = p.iter().zip(t).filter(|(a, b)| map[**a] == **b).count();
            *best = (*best).max(hits);
            return;
        }
        for c in 0..k {
            if !used[c] {
                used[c] = true;
                map[pos] = c;
                go(pos + 1, k, used, map, p, t, best);
                used[c] = false;
            }
        }
    }
    let mut best = 0;
    go(0, k, &mut vec![false; k], &mut vec![0; k], predicted, truth, &mut best);
    best as f64 / predicted.len() as f64
}
