use super::EvalError;

/// Area under the ROC curve as the Mann–Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties
/// counting one half. Computed from average ranks in `O(n log n)`.
pub fn auc(positive: &[f64], negative: &[f64]) -> Result<f64, EvalError> {
    if positive.is_empty() {
        return Err(EvalError::EmptyPositives);
    }
    if negative.is_empty() {
        return Err(EvalError::EmptyNegatives);
    }
    let mut all: Vec<(f64, bool)> = positive
        .iter()
        .map(|&s| (s, true))
        .chain(negative.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // rank sums are multiples of 1/2, so they stay exact in f64
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_run = all[i..j].iter().filter(|e| e.1).count();
        pos_rank_sum += avg_rank * pos_in_run as f64;
        i = j;
    }
    let (np, nn) = (positive.len() as f64, negative.len() as f64);
    Ok((pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

#[cfg(test)]
pub(crate) fn auc_brute_force(positive: &[f64], negative: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in positive {
        for n in negative {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (positive.len() * negative.len()) as f64
}
