use super::space::{transform, untransform, Configuration, Dim, DimKind, HyperparameterSpace, SpaceError};

/// Shrinks each numeric range to `(1 − α)` of its width (log width for log
/// dims), centered on `best` and shifted, never clipped, to stay inside the
/// original range. Categorical dims collapse to `best`'s choice when
/// `α ≥ 0.5` and are otherwise left alone.
pub fn trim_space(
    space: &HyperparameterSpace,
    best: &Configuration,
    alpha: f64,
) -> Result<HyperparameterSpace, TrimError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TrimError::InvalidAlpha(alpha));
    }
    if !space.contains(best) {
        return Err(TrimError::BestOutsideSpace);
    }
    let dims = space
        .dims()
        .iter()
        .map(|d| {
            let value = best.get(&d.name).expect("contained config has every dim");
            let kind = match &d.kind {
                DimKind::Numeric {
                    lo,
                    hi,
                    integer,
                    log_scale,
                } => {
                    let (a, b) = (transform(*lo, *log_scale), transform(*hi, *log_scale));
                    let width = (1.0 - alpha) * (b - a);
                    let c = transform(value.as_f64().unwrap(), *log_scale);
                    let (new_lo, new_hi) = if c - width / 2.0 < a {
                        (*lo, untransform(a + width, *log_scale))
                    } else if c + width / 2.0 > b {
                        (untransform(b - width, *log_scale), *hi)
                    } else {
                        (
                            untransform(c - width / 2.0, *log_scale),
                            untransform(c + width / 2.0, *log_scale),
                        )
                    };
                    // guard against exp/ln round-off pushing `best` outside
                    let x = value.as_f64().unwrap();
                    DimKind::Numeric {
                        lo: new_lo.clamp(*lo, *hi).min(x),
                        hi: new_hi.clamp(*lo, *hi).max(x),
                        integer: *integer,
                        log_scale: *log_scale,
                    }
                }
                DimKind::Categorical { choices } => {
                    if alpha >= 0.5 {
                        DimKind::Categorical {
                            choices: vec![value.to_string()],
                        }
                    } else {
                        DimKind::Categorical {
                            choices: choices.clone(),
                        }
                    }
                }
            };
            Dim {
                name: d.name.clone(),
                kind,
            }
        })
        .collect();
    Ok(HyperparameterSpace::new(dims)?)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TrimError {
    #[error("trim factor must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("best configuration lies outside the space being trimmed")]
    BestOutsideSpace,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// `true` if every dimension of `inner` is nested in the same-named dim of `outer`.
pub fn is_subspace(inner: &HyperparameterSpace, outer: &HyperparameterSpace) -> bool {
    inner.dims().len() == outer.dims().len()
        && inner.dims().iter().zip(outer.dims()).all(|(i, o)| {
            i.name == o.name
                && match (&i.kind, &o.kind) {
                    (
                        DimKind::Numeric { lo: il, hi: ih, .. },
                        DimKind::Numeric { lo: ol, hi: oh, .. },
                    ) => il >= ol && ih <= oh,
                    (DimKind::Categorical { choices: ic }, DimKind::Categorical { choices: oc }) => {
                        ic.iter().all(|c| oc.contains(c))
                    }
                    _ => false,
                }
        })
}
