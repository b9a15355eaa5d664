use rand::Rng;

use super::CoarsenError;
use crate::embed::EmbeddingMatrix;
use crate::rng;

/// Copies each synopsis row to the original nodes it absorbed and adds a
/// zero-mean uniform perturbation in `[-eps_scale, eps_scale]` per coordinate.
pub fn lift_embeddings(
    synopsis_embeddings: &EmbeddingMatrix,
    projection: &[usize],
    eps_scale: f64,
    seed: u64,
) -> Result<EmbeddingMatrix, CoarsenError> {
    let rows = synopsis_embeddings.rows();
    let dim = synopsis_embeddings.dim();
    let mut values = Vec::with_capacity(projection.len() * dim);
    let mut rng = rng::seeded(seed);
    for &s in projection {
        if s >= rows {
            return Err(CoarsenError::DimensionMismatch { node: s, rows });
        }
        for &x in synopsis_embeddings.row(s) {
            let noise = if eps_scale > 0.0 {
                rng.gen_range(-eps_scale..=eps_scale)
            } else {
                0.0
            };
            values.push(x + noise);
        }
    }
    Ok(EmbeddingMatrix::new(projection.len(), dim, values).expect("finite inputs"))
}
