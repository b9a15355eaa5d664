//! Latin hypercube sampling over mixed spaces.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::space::{Configuration, DimKind, HyperparameterSpace, Value};
use crate::rng;

#[derive(Debug, Error, PartialEq)]
#[error("sample count must be at least 1")]
pub struct EmptySample;

/// Draws `count` configurations. Each numeric dimension (in log space for
/// log dims) is cut into `count` equal strata holding exactly one sample each;
/// strata are matched to samples by an independent permutation per
/// dimension. Categorical dimensions cycle through a shuffled choice order so
/// choice counts differ by at most one.
pub fn lhs_sample(
    space: &HyperparameterSpace,
    count: usize,
    seed: u64,
) -> Result<Vec<Configuration>, EmptySample> {
    if count == 0 {
        return Err(EmptySample);
    }
    let mut rng = rng::seeded(seed);
    let mut columns: Vec<Vec<Value>> = Vec::with_capacity(space.dims().len());
    for dim in space.dims() {
        let column = match &dim.kind {
            DimKind::Numeric { .. } => {
                let mut strata: Vec<usize> = (0..count).collect();
                strata.shuffle(&mut rng);
                strata
                    .into_iter()
                    .map(|s| {
                        let t = (s as f64 + rng.gen::<f64>()) / count as f64;
                        dim.value_at(t)
                    })
                    .collect()
            }
            DimKind::Categorical { choices } => {
                let mut order = choices.clone();
                order.shuffle(&mut rng);
                let mut column: Vec<Value> = order
                    .iter()
                    .cycle()
                    .take(count)
                    .map(|c| Value::Choice(c.clone()))
                    .collect();
                column.shuffle(&mut rng);
                column
            }
        };
        columns.push(column);
    }
    Ok((0..count)
        .map(|i| {
            Configuration::from_entries(
                space
                    .dims()
                    .iter()
                    .zip(&columns)
                    .map(|(d, col)| (d.name.clone(), col[i].clone()))
                    .collect(),
            )
        })
        .collect())
}
