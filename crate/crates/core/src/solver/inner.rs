use crate::error::{Error, Result};
use crate::vectorspace::{distance, NormKind, Vector};

/// Relaxation factor used when the contraction preflight is overridden.
pub const OVERRIDE_RELAXATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Run the inner loop even when the declared constants do not certify a
    /// contraction, with relaxation [`OVERRIDE_RELAXATION`].
    pub allow_noncontractive: bool,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
            allow_noncontractive: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerSolveReport {
    pub iterations: usize,
    /// `||x - G(x)||` at the returned point.
    pub residual: f64,
    /// Largest observed ratio of consecutive residuals.
    pub contraction_estimate: f64,
    pub converged: bool,
    /// Relaxation factor the loop ran with (1 for plain Picard).
    pub relaxation: f64,
}

impl InnerSolveReport {
    pub(crate) fn direct() -> Self {
        Self {
            iterations: 0,
            residual: 0.0,
            contraction_estimate: 0.0,
            converged: true,
            relaxation: 1.0,
        }
    }
}

/// Pick the relaxation factor for a step whose map has Lipschitz bound
/// `bound`, or refuse.
pub(crate) fn preflight(n: usize, bound: f64, opts: &InnerOptions) -> Result<f64> {
    if bound < 1.0 {
        Ok(1.0)
    } else if opts.allow_noncontractive {
        log::debug!("step {n}: contraction bound {bound} >= 1, relaxing with {OVERRIDE_RELAXATION}");
        Ok(OVERRIDE_RELAXATION)
    } else {
        Err(Error::ContractionPrecondition { n, bound })
    }
}

/// Relaxed Picard iteration `x <- (1 - w) x + w G(x)` from `start`.
///
/// Returns the first iterate with `||x - G(x)|| <= tol`; the report is
/// returned with `converged = false` when `max_iter` runs out first.
pub(crate) fn picard<G>(
    mut g: G,
    start: &Vector,
    relaxation: f64,
    opts: &InnerOptions,
    kind: NormKind,
) -> Result<(Vector, InnerSolveReport)>
where
    G: FnMut(&Vector) -> Result<Vector>,
{
    let mut x = start.clone();
    let mut prev_residual: Option<f64> = None;
    let mut contraction: f64 = 0.0;
    let mut iterations = 0;
    loop {
        let gx = g(&x)?;
        let residual = distance(&x, &gx, kind)?;
        if let Some(prev) = prev_residual {
            if prev > 0.0 {
                contraction = contraction.max(residual / prev);
            }
        }
        let converged = residual <= opts.tol;
        if converged || iterations >= opts.max_iter {
            return Ok((
                x,
                InnerSolveReport {
                    iterations,
                    residual,
                    contraction_estimate: contraction,
                    converged,
                    relaxation,
                },
            ));
        }
        x = if relaxation == 1.0 {
            gx
        } else {
            x.scale(1.0 - relaxation).add_scaled(relaxation, &gx)?
        };
        prev_residual = Some(residual);
        iterations += 1;
    }
}
