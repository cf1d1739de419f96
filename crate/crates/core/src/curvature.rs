//! Curvature tensors from a metric jet, with every derivative in closed form.
//!
//! Conventions are fixed operationally and audited by the test suite:
//!
//! * Riemann is defined through the covector commutator
//!   `[∇_i, ∇_j] X_k = R_{ijk}{}^m X_m`, which in coordinates reads
//!   `R_{ijk}{}^s = ∂_j Γ^s_{ik} - ∂_i Γ^s_{jk} + Γ^a_{ik} Γ^s_{ja} - Γ^a_{jk} Γ^s_{ia}`.
//! * Ricci contracts slots 2 and 4 of the all-down Riemann,
//!   `R_{ik} = g^{jm} R_{ijkm}`; with this choice the unit round 2-sphere has
//!   scalar curvature +2 and timelike concircular vectors satisfy
//!   `R_{im} X^m = -(n-1) ∇_i ρ`.
//! * The Weyl tensor is
//!   `C_{jklm} = R_{jklm} + (g_{jm}R_{kl} - g_{km}R_{jl} + R_{jm}g_{kl} - R_{km}g_{jl})/(n-2)
//!    - R (g_{jm}g_{kl} - g_{jl}g_{km}) / ((n-1)(n-2))`.
//!
//! No finite differences anywhere in this module: `∂Γ` and `∂∂Γ` come from the
//! order-3 metric jet, so identity residuals sit near machine precision.

use crate::tensor::{
    covariant_derivative, MetricJet, Slot, Tensor, TensorError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("Weyl tensor requires dimension >= 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("degenerate vector: |X²| = {0:.3e} < 1e-10")]
    DegenerateVector(f64),
}

const DOWN2: [Slot; 2] = [Slot::Down; 2];
const DOWN3: [Slot; 3] = [Slot::Down; 3];
const DOWN4: [Slot; 4] = [Slot::Down; 4];
const DOWN5: [Slot; 5] = [Slot::Down; 5];

/// Levi-Civita connection coefficients and their coordinate derivatives.
///
/// Layout: `gamma[s][j][k] = Γ^s_{jk}`, `dgamma[a][s][j][k] = ∂_a Γ^s_{jk}`,
/// `ddgamma[a][b][s][j][k] = ∂_a ∂_b Γ^s_{jk}`.
#[derive(Debug, Clone)]
pub struct ChristoffelData {
    pub gamma: Tensor,
    pub dgamma: Tensor,
    pub ddgamma: Tensor,
}

/// `Γ^s_{jk} = ½ g^{sa} (∂_j g_{ak} + ∂_k g_{aj} - ∂_a g_{jk})`, with first and
/// second coordinate derivatives assembled exactly from the jet.
pub fn christoffel(jet: &MetricJet) -> ChristoffelData {
    let n = jet.dim();
    let g_inv = jet.g_inv();
    let dg = jet.dg();
    let ddg = jet.ddg();
    let dddg = jet.dddg();
    let dg_inv = jet.dg_inv();
    let ddg_inv = second_inverse_partials(jet, &dg_inv);

    // A[a][j][k] = ∂_j g_{ak} + ∂_k g_{aj} - ∂_a g_{jk} and its partials
    let bracket = |a: usize, j: usize, k: usize| {
        dg.get(&[j, a, k]) + dg.get(&[k, a, j]) - dg.get(&[a, j, k])
    };
    let dbracket = |c: usize, a: usize, j: usize, k: usize| {
        ddg.get(&[c, j, a, k]) + ddg.get(&[c, k, a, j]) - ddg.get(&[c, a, j, k])
    };
    let ddbracket = |c: usize, d: usize, a: usize, j: usize, k: usize| {
        dddg.get(&[c, d, j, a, k]) + dddg.get(&[c, d, k, a, j]) - dddg.get(&[c, d, a, j, k])
    };

    let gamma = Tensor::from_fn(n, &[Slot::Up, Slot::Down, Slot::Down], |i| {
        let (s, j, k) = (i[0], i[1], i[2]);
        let mut v = 0.0;
        for a in 0..n {
            v += g_inv.get(&[s, a]) * bracket(a, j, k);
        }
        0.5 * v
    });

    let dgamma = Tensor::from_fn(n, &[Slot::Down, Slot::Up, Slot::Down, Slot::Down], |i| {
        let (c, s, j, k) = (i[0], i[1], i[2], i[3]);
        let mut v = 0.0;
        for a in 0..n {
            v += dg_inv.get(&[c, s, a]) * bracket(a, j, k) + g_inv.get(&[s, a]) * dbracket(c, a, j, k);
        }
        0.5 * v
    });

    let ddgamma = Tensor::from_fn(
        n,
        &[Slot::Down, Slot::Down, Slot::Up, Slot::Down, Slot::Down],
        |i| {
            let (c, d, s, j, k) = (i[0], i[1], i[2], i[3], i[4]);
            let mut v = 0.0;
            for a in 0..n {
                v += ddg_inv.get(&[c, d, s, a]) * bracket(a, j, k)
                    + dg_inv.get(&[c, s, a]) * dbracket(d, a, j, k)
                    + dg_inv.get(&[d, s, a]) * dbracket(c, a, j, k)
                    + g_inv.get(&[s, a]) * ddbracket(c, d, a, j, k);
            }
            0.5 * v
        },
    );

    ChristoffelData { gamma, dgamma, ddgamma }
}

/// `∂_c ∂_d g^{jk}`, layout `[c][d][j][k]`.
fn second_inverse_partials(jet: &MetricJet, dg_inv: &Tensor) -> Tensor {
    let n = jet.dim();
    let g_inv = jet.g_inv();
    let dg = jet.dg();
    let ddg = jet.ddg();
    Tensor::from_fn(n, &[Slot::Down, Slot::Down, Slot::Up, Slot::Up], |i| {
        let (c, d, j, k) = (i[0], i[1], i[2], i[3]);
        let mut v = 0.0;
        for m in 0..n {
            for l in 0..n {
                v -= dg_inv.get(&[d, j, m]) * dg.get(&[c, m, l]) * g_inv.get(&[k, l])
                    + g_inv.get(&[j, m]) * ddg.get(&[c, d, m, l]) * g_inv.get(&[k, l])
                    + g_inv.get(&[j, m]) * dg.get(&[c, m, l]) * dg_inv.get(&[d, k, l]);
            }
        }
        v
    })
}

/// All-down Riemann `R_{ijkm}` under the commutator convention, and the
/// matching coordinate partials `∂_c R_{ijkm}` when requested.
fn riemann_with_partials(jet: &MetricJet, chr: &ChristoffelData, want_partials: bool) -> (Tensor, Option<Tensor>) {
    let n = jet.dim();
    let gamma = &chr.gamma;
    let dgamma = &chr.dgamma;

    let up = Tensor::from_fn(n, &[Slot::Down, Slot::Down, Slot::Down, Slot::Up], |i| {
        let (a, b, k, s) = (i[0], i[1], i[2], i[3]);
        let mut v = dgamma.get(&[b, s, a, k]) - dgamma.get(&[a, s, b, k]);
        for m in 0..n {
            v += gamma.get(&[m, a, k]) * gamma.get(&[s, b, m])
                - gamma.get(&[m, b, k]) * gamma.get(&[s, a, m]);
        }
        v
    });

    let g = jet.g();
    let dg = jet.dg();
    let down = Tensor::from_fn(n, &DOWN4, |i| {
        let mut v = 0.0;
        for s in 0..n {
            v += up.get(&[i[0], i[1], i[2], s]) * g.get(&[s, i[3]]);
        }
        v
    });

    if !want_partials {
        return (down, None);
    }

    let ddgamma = &chr.ddgamma;
    let dup = Tensor::from_fn(n, &[Slot::Down, Slot::Down, Slot::Down, Slot::Down, Slot::Up], |i| {
        let (c, a, b, k, s) = (i[0], i[1], i[2], i[3], i[4]);
        let mut v = ddgamma.get(&[c, b, s, a, k]) - ddgamma.get(&[c, a, s, b, k]);
        for m in 0..n {
            v += dgamma.get(&[c, m, a, k]) * gamma.get(&[s, b, m])
                + gamma.get(&[m, a, k]) * dgamma.get(&[c, s, b, m])
                - dgamma.get(&[c, m, b, k]) * gamma.get(&[s, a, m])
                - gamma.get(&[m, b, k]) * dgamma.get(&[c, s, a, m]);
        }
        v
    });

    let ddown = Tensor::from_fn(n, &DOWN5, |i| {
        let (c, a, b, k, m) = (i[0], i[1], i[2], i[3], i[4]);
        let mut v = 0.0;
        for s in 0..n {
            v += dup.get(&[c, a, b, k, s]) * g.get(&[s, m]) + up.get(&[a, b, k, s]) * dg.get(&[c, s, m]);
        }
        v
    });

    (down, Some(ddown))
}

/// All-down Riemann tensor `R_{ijkm}`.
pub fn riemann(jet: &MetricJet) -> Tensor {
    let chr = christoffel(jet);
    riemann_with_partials(jet, &chr, false).0
}

/// Ricci tensor `R_{ik} = g^{jm} R_{ijkm}` (slots 2 and 4 contracted).
pub fn ricci(riemann: &Tensor, jet: &MetricJet) -> Tensor {
    let n = jet.dim();
    let g_inv = jet.g_inv();
    Tensor::from_fn(n, &DOWN2, |i| {
        let (a, k) = (i[0], i[1]);
        let mut v = 0.0;
        for j in 0..n {
            for m in 0..n {
                v += g_inv.get(&[j, m]) * riemann.get(&[a, j, k, m]);
            }
        }
        v
    })
}

/// Scalar curvature `R = g^{ik} R_{ik}`.
pub fn scalar_curvature(ricci: &Tensor, jet: &MetricJet) -> f64 {
    let n = jet.dim();
    let g_inv = jet.g_inv();
    let mut v = 0.0;
    for i in 0..n {
        for k in 0..n {
            v += g_inv.get(&[i, k]) * ricci.get(&[i, k]);
        }
    }
    v
}

/// Weyl tensor from its defining decomposition; totally traceless.
pub fn weyl(riemann: &Tensor, ricci: &Tensor, scalar: f64, jet: &MetricJet) -> Result<Tensor, CurvatureError> {
    let n = jet.dim();
    if n < 3 {
        return Err(CurvatureError::DimensionTooSmall(n));
    }
    let g = jet.g();
    let cn = 1.0 / (n as f64 - 2.0);
    let cr = scalar / ((n as f64 - 1.0) * (n as f64 - 2.0));
    Ok(Tensor::from_fn(n, &DOWN4, |i| {
        let (j, k, l, m) = (i[0], i[1], i[2], i[3]);
        riemann.get(&[j, k, l, m])
            + cn * (g.get(&[j, m]) * ricci.get(&[k, l]) - g.get(&[k, m]) * ricci.get(&[j, l])
                + ricci.get(&[j, m]) * g.get(&[k, l])
                - ricci.get(&[k, m]) * g.get(&[j, l]))
            - cr * (g.get(&[j, m]) * g.get(&[k, l]) - g.get(&[j, l]) * g.get(&[k, m]))
    }))
}

/// The auxiliary tensor `𝖢_{jk} = C_{ajkb} X^a X^b / X²`; symmetric, traceless,
/// annihilated by X. Errors when X is numerically null.
pub fn c_aux(weyl: &Tensor, x: &Tensor, jet: &MetricJet) -> Result<Tensor, CurvatureError> {
    let n = jet.dim();
    let x_up = x.raise_index(0, jet)?;
    let mut x2 = 0.0;
    for k in 0..n {
        x2 += x_up.get(&[k]) * x.get(&[k]);
    }
    if x2.abs() < 1e-10 {
        return Err(CurvatureError::DegenerateVector(x2.abs()));
    }
    Ok(Tensor::from_fn(n, &DOWN2, |i| {
        let (j, k) = (i[0], i[1]);
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                v += weyl.get(&[a, j, k, b]) * x_up.get(&[a]) * x_up.get(&[b]);
            }
        }
        v / x2
    }))
}

/// Everything the identity suite needs at one point, all from the jet.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub christoffel: ChristoffelData,
    /// All-down `R_{jklm}`.
    pub riemann: Tensor,
    /// `∇_a R_{jklm}`, layout `[a][j][k][l][m]`.
    pub nabla_riemann: Tensor,
    pub ricci: Tensor,
    /// `∇_a R_{jk}`, layout `[a][j][k]`.
    pub d_ricci: Tensor,
    pub scalar: f64,
    /// `∇_a R = ∂_a R`, rank 1.
    pub d_scalar: Tensor,
    pub weyl: Tensor,
    /// `∇_a C_{jklm}`, layout `[a][j][k][l][m]`.
    pub nabla_weyl: Tensor,
    /// `∇^m C_{jklm}`, layout `[j][k][l]`, computed by direct covariant
    /// differentiation of the Weyl field (the spec's "direct" route).
    pub div_weyl: Tensor,
    /// `𝖢_{jk}`; populated by [`CurvatureBundle::attach_chen_vector`].
    pub c_aux: Option<Tensor>,
}

impl CurvatureBundle {
    pub fn compute(jet: &MetricJet) -> Result<Self, CurvatureError> {
        let n = jet.dim();
        let chr = christoffel(jet);
        let (riem, driem) = riemann_with_partials(jet, &chr, true);
        let driem = driem.expect("partials requested");
        let nabla_riemann = covariant_derivative(&riem, &driem, &chr.gamma)?;

        let ric = ricci(&riem, jet);
        let g_inv = jet.g_inv();
        let dg_inv = jet.dg_inv();
        // ∂_c R_{ik} = ∂_c g^{jm} R_{ijkm} + g^{jm} ∂_c R_{ijkm}
        let dric = Tensor::from_fn(n, &DOWN3, |i| {
            let (c, a, k) = (i[0], i[1], i[2]);
            let mut v = 0.0;
            for j in 0..n {
                for m in 0..n {
                    v += dg_inv.get(&[c, j, m]) * riem.get(&[a, j, k, m])
                        + g_inv.get(&[j, m]) * driem.get(&[c, a, j, k, m]);
                }
            }
            v
        });
        let d_ricci = covariant_derivative(&ric, &dric, &chr.gamma)?;

        let scal = scalar_curvature(&ric, jet);
        let d_scalar = Tensor::from_fn(n, &[Slot::Down], |i| {
            let c = i[0];
            let mut v = 0.0;
            for a in 0..n {
                for k in 0..n {
                    v += dg_inv.get(&[c, a, k]) * ric.get(&[a, k]) + g_inv.get(&[a, k]) * dric.get(&[c, a, k]);
                }
            }
            v
        });

        let wy = weyl(&riem, &ric, scal, jet)?;
        let g = jet.g();
        let dg = jet.dg();
        let cn = 1.0 / (n as f64 - 2.0);
        let cd = 1.0 / ((n as f64 - 1.0) * (n as f64 - 2.0));
        // ∂_c C_{jklm} by the product rule over ∂R_{jklm}, ∂Ric, ∂R, ∂g
        let dwy = Tensor::from_fn(n, &DOWN5, |i| {
            let (c, j, k, l, m) = (i[0], i[1], i[2], i[3], i[4]);
            let term_ric = dg.get(&[c, j, m]) * ric.get(&[k, l]) + g.get(&[j, m]) * dric.get(&[c, k, l])
                - dg.get(&[c, k, m]) * ric.get(&[j, l])
                - g.get(&[k, m]) * dric.get(&[c, j, l])
                + dric.get(&[c, j, m]) * g.get(&[k, l])
                + ric.get(&[j, m]) * dg.get(&[c, k, l])
                - dric.get(&[c, k, m]) * g.get(&[j, l])
                - ric.get(&[k, m]) * dg.get(&[c, j, l]);
            let gg = g.get(&[j, m]) * g.get(&[k, l]) - g.get(&[j, l]) * g.get(&[k, m]);
            let dgg = dg.get(&[c, j, m]) * g.get(&[k, l]) + g.get(&[j, m]) * dg.get(&[c, k, l])
                - dg.get(&[c, j, l]) * g.get(&[k, m])
                - g.get(&[j, l]) * dg.get(&[c, k, m]);
            driem.get(&[c, j, k, l, m]) + cn * term_ric - cd * (d_scalar.get(&[c]) * gg + scal * dgg)
        });
        let nabla_weyl = covariant_derivative(&wy, &dwy, &chr.gamma)?;

        let div_weyl = Tensor::from_fn(n, &DOWN3, |i| {
            let (j, k, l) = (i[0], i[1], i[2]);
            let mut v = 0.0;
            for m in 0..n {
                for a in 0..n {
                    v += g_inv.get(&[m, a]) * nabla_weyl.get(&[a, j, k, l, m]);
                }
            }
            v
        });

        Ok(CurvatureBundle {
            christoffel: chr,
            riemann: riem,
            nabla_riemann,
            ricci: ric,
            d_ricci,
            scalar: scal,
            d_scalar,
            weyl: wy,
            nabla_weyl,
            div_weyl,
            c_aux: None,
        })
    }

    /// Fill in `𝖢_{jk}` for a candidate concircular covector.
    pub fn attach_chen_vector(&mut self, x: &Tensor, jet: &MetricJet) -> Result<(), CurvatureError> {
        self.c_aux = Some(c_aux(&self.weyl, x, jet)?);
        Ok(())
    }
}

/// `∇^m C_{jklm}` by direct covariant differentiation of the Weyl field.
pub fn div_weyl_direct(jet: &MetricJet) -> Result<Tensor, CurvatureError> {
    Ok(CurvatureBundle::compute(jet)?.div_weyl)
}

/// `∇^m C_{jklm}` through the Ricci form
/// `-(n-3)/(n-2) [∇_j R_{kl} - ∇_k R_{jl} - (g_{kl} ∇_j R - g_{jl} ∇_k R)/(2(n-1))]`.
///
/// An independent formula path from [`div_weyl_direct`]; the two must agree on
/// every metric, which is the standing cross-check for both.
pub fn div_weyl_via_ricci(jet: &MetricJet) -> Result<Tensor, CurvatureError> {
    let bundle = CurvatureBundle::compute(jet)?;
    Ok(div_weyl_from_ricci_parts(&bundle, jet))
}

/// Same formula given an already-computed bundle.
pub fn div_weyl_from_ricci_parts(bundle: &CurvatureBundle, jet: &MetricJet) -> Tensor {
    let n = jet.dim();
    let g = jet.g();
    let d_ricci = &bundle.d_ricci;
    let d_scalar = &bundle.d_scalar;
    let pref = -(n as f64 - 3.0) / (n as f64 - 2.0);
    let c2 = 1.0 / (2.0 * (n as f64 - 1.0));
    Tensor::from_fn(n, &DOWN3, |i| {
        let (j, k, l) = (i[0], i[1], i[2]);
        pref * (d_ricci.get(&[j, k, l]) - d_ricci.get(&[k, j, l])
            - c2 * (g.get(&[k, l]) * d_scalar.get(&[j]) - g.get(&[j, l]) * d_scalar.get(&[k])))
    })
}

/// Ricci and scalar curvature only (no order-3 machinery); used where the
/// full bundle is overkill, e.g. evaluating the Ricci-eigenvalue field at
/// finite-difference stencil points.
pub fn ricci_scalar_only(jet: &MetricJet) -> (Tensor, f64) {
    let riem = riemann(jet);
    let ric = ricci(&riem, jet);
    let scal = scalar_curvature(&ric, jet);
    (ric, scal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{each_index, rel_residual, MetricJet, Point, Slot, Tensor};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat_jet(n: usize) -> MetricJet {
        let g = Tensor::from_fn(n, &DOWN2, |i| {
            if i[0] == i[1] {
                if i[0] == 0 {
                    -1.0
                } else {
                    1.0
                }
            } else {
                0.0
            }
        });
        MetricJet::new(
            g,
            Tensor::zeros(n, &DOWN3),
            Tensor::zeros(n, &DOWN4),
            Tensor::zeros(n, &DOWN5),
        )
        .unwrap()
    }

    #[test]
    fn minkowski_is_flat() {
        let jet = flat_jet(4);
        let chr = christoffel(&jet);
        assert_eq!(chr.gamma.max_abs(), 0.0);
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        assert_eq!(bundle.riemann.max_abs(), 0.0);
        assert_eq!(bundle.ricci.max_abs(), 0.0);
        assert_eq!(bundle.scalar, 0.0);
        assert_eq!(bundle.div_weyl.max_abs(), 0.0);
    }

    /// Unit round 2-sphere: pins the global sign of the scalar curvature.
    #[test]
    fn round_sphere_scalar_curvature_is_plus_two() {
        let jet = crate::metrics::round_sphere_jet(&Point::new(vec![1.1, 0.4]).unwrap()).unwrap();
        let riem = riemann(&jet);
        let ric = ricci(&riem, &jet);
        let r = scalar_curvature(&ric, &jet);
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn flrw_christoffels_match_warped_product_formulas() {
        // q(t) = e^t at t = 0.37: the only nonzero symbols are
        // Γ^t_{μμ} = q q' and Γ^μ_{tμ} = q'/q.
        let fam = crate::metrics::rw(4, 0, crate::metrics::WarpSpec::exp(1.0)).unwrap();
        let t = 0.37;
        let p = Point::new(vec![t, 0.2, -0.4, 0.8]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let chr = christoffel(&jet);
        let q = t.exp();
        let qp = t.exp();
        for s in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let expect = if s == 0 && j == k && j > 0 {
                        q * qp
                    } else if s > 0 && ((j == 0 && k == s) || (k == 0 && j == s)) {
                        qp / q
                    } else {
                        0.0
                    };
                    assert_abs_diff_eq!(chr.gamma.get(&[s, j, k]), expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn schwarzschild_christoffel_and_vacuum() {
        let fam = crate::metrics::schwarzschild(1.0).unwrap();
        let p = Point::new(vec![0.0, 10.0, 1.2, 0.7]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let chr = christoffel(&jet);
        // Γ^t_{tr} = M/(r(r-2M)) = 1/80 at M=1, r=10
        assert_relative_eq!(chr.gamma.get(&[0, 0, 1]), 1.0 / 80.0, epsilon = 1e-12);
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        assert!(bundle.ricci.max_abs() <= 1e-10, "vacuum Ricci, got {}", bundle.ricci.max_abs());
        assert!(bundle.scalar.abs() <= 1e-10);
        // vacuum also forces a harmonic Weyl tensor
        assert!(bundle.div_weyl.max_abs() <= 1e-9, "divC = {}", bundle.div_weyl.max_abs());
        assert!(bundle.weyl.max_abs() > 1e-4);
    }

    #[test]
    fn de_sitter_has_constant_curvature_k_equals_h_squared() {
        let h = 1.0;
        let fam = crate::metrics::de_sitter(4, h).unwrap();
        let p = Point::new(vec![0.3, 0.2, -0.4, 0.7]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        // least-squares fit of R_{jklm} = K (g_{jl} g_{km} - g_{jm} g_{kl})
        let g = jet.g();
        let form = Tensor::from_fn(4, &DOWN4, |i| {
            let (j, k, l, m) = (i[0], i[1], i[2], i[3]);
            g.get(&[j, l]) * g.get(&[k, m]) - g.get(&[j, m]) * g.get(&[k, l])
        });
        let mut num = 0.0;
        let mut den = 0.0;
        each_index(4, 4, |idx| {
            num += bundle.riemann.get(idx) * form.get(idx);
            den += form.get(idx) * form.get(idx);
        });
        let kfit = num / den;
        assert_relative_eq!(kfit, h * h, epsilon = 1e-10);
        assert!(rel_residual(&bundle.riemann, &form.scale(kfit)).unwrap() <= 1e-10);
        assert_relative_eq!(bundle.scalar, 12.0 * h * h, epsilon = 1e-10);
        // constant curvature is conformally flat
        assert!(bundle.weyl.max_abs() <= 1e-10);
    }

    #[test]
    fn weyl_requires_three_dimensions() {
        let jet = crate::metrics::round_sphere_jet(&Point::new(vec![1.0, 0.5]).unwrap()).unwrap();
        let riem = riemann(&jet);
        let ric = ricci(&riem, &jet);
        let r = scalar_curvature(&ric, &jet);
        assert!(matches!(
            weyl(&riem, &ric, r, &jet),
            Err(CurvatureError::DimensionTooSmall(2))
        ));
    }

    #[test]
    fn ricci_trace_consistency_via_contract() {
        // Ricci(up,down) trace equals scalar_curvature output on de Sitter.
        let fam = crate::metrics::de_sitter(4, 1.0).unwrap();
        let p = Point::new(vec![0.1, 0.5, 0.6, -0.2]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let riem = riemann(&jet);
        let ric = ricci(&riem, &jet);
        let mixed = ric.raise_index(0, &jet).unwrap();
        let trace = mixed.contract(0, 1).unwrap();
        assert_relative_eq!(trace.get(&[]), scalar_curvature(&ric, &jet), epsilon = 1e-12);
    }

    #[test]
    fn div_weyl_vanishes_identically_in_three_dimensions() {
        let fam = crate::metrics::rw(3, 0, crate::metrics::WarpSpec::power(0.5)).unwrap();
        let p = Point::new(vec![1.3, 0.2, -0.7]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let via = div_weyl_via_ricci(&jet).unwrap();
        assert_eq!(via.max_abs(), 0.0); // (n-3) prefactor
        let direct = div_weyl_direct(&jet).unwrap();
        assert!(direct.max_abs() <= 1e-10); // Weyl itself vanishes in 3d
    }

    #[test]
    fn c_aux_properties_on_generic_grw() {
        let fam = crate::metrics::grw_h2xr(crate::metrics::WarpSpec::exp(1.0)).unwrap();
        let p = Point::new(vec![0.3, 0.2, -0.4, 0.7]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let cand = fam.chen_candidate_at(&p).unwrap();
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        let cc = c_aux(&bundle.weyl, cand.vector.x(), &jet).unwrap();
        assert!(cc.max_abs() > 1e-4, "H²×R fiber must leave a nonzero 𝖢");
        // traceless
        let mut tr = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                tr += jet.g_inv().get(&[j, k]) * cc.get(&[j, k]);
            }
        }
        assert!(tr.abs() <= 1e-10);
        // annihilated by X
        let x_up = cand.vector.x().raise_index(0, &jet).unwrap();
        for k in 0..4 {
            let mut v = 0.0;
            for j in 0..4 {
                v += x_up.get(&[j]) * cc.get(&[j, k]);
            }
            assert!(v.abs() <= 1e-10);
        }
        // symmetric
        for j in 0..4 {
            for k in 0..4 {
                assert_abs_diff_eq!(cc.get(&[j, k]), cc.get(&[k, j]), epsilon = 1e-12);
            }
        }
        // scaling X leaves 𝖢 unchanged
        let cc2 = c_aux(&bundle.weyl, &cand.vector.x().scale(3.7), &jet).unwrap();
        assert!(rel_residual(&cc, &cc2).unwrap() <= 1e-12);
    }

    #[test]
    fn c_aux_zero_on_conformally_flat() {
        let fam = crate::metrics::rw(4, 1, crate::metrics::WarpSpec::exp(1.0)).unwrap();
        let p = Point::new(vec![0.2, 1.0, 1.1, 2.0]).unwrap();
        let jet = fam.jet_at(&p).unwrap();
        let cand = fam.chen_candidate_at(&p).unwrap();
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        let cc = c_aux(&bundle.weyl, cand.vector.x(), &jet).unwrap();
        assert!(cc.max_abs() <= 1e-10);
    }

    #[test]
    fn c_aux_rejects_null_vector() {
        let jet = flat_jet(4);
        let bundle = CurvatureBundle::compute(&jet).unwrap();
        // null covector: X = (1, 1, 0, 0) has X² = -1 + 1 = 0
        let x = Tensor::from_fn(4, &[Slot::Down], |i| if i[0] <= 1 { 1.0 } else { 0.0 });
        assert!(matches!(
            c_aux(&bundle.weyl, &x, &jet),
            Err(CurvatureError::DegenerateVector(_))
        ));
    }
}
