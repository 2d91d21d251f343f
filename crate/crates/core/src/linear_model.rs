//! Linearization about hover, the transfer-function matrix
//! `H(s) = C (sI - A)^-1 B + D`, pole bookkeeping and closed-form responses
//! of integrator chains.
//!
//! Inputs of the linear model are `(u1, u2, g)`: gravity is carried as a third
//! input channel so the model needs no constant term and `D` stays zero.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use libm::{log2, round};
use thiserror::Error;

use crate::dynamics::{QuadParams, State, StateDeriv};
use crate::matrix::Matrix;
use crate::poly::{format_number, PolyError, Polynomial, RationalTF};

pub const OUTPUT_LABELS: [&str; 2] = ["x", "y"];
pub const INPUT_LABELS: [&str; 3] = ["u1", "u2", "g"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported transfer function form: {0}")]
    UnsupportedForm(String),
    #[error("invalid rational function: {0}")]
    InvalidRational(#[from] PolyError),
    #[error("gain is not a monomial in (m, g, J): {0}")]
    NotMonomial(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

impl StateSpace {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self, LinearModelError> {
        let dim = |msg: String| Err(LinearModelError::Dimension(msg));
        if !a.is_square() {
            return dim(format!("A is {}x{}, expected square", a.rows(), a.cols()));
        }
        let n = a.rows();
        if b.rows() != n {
            return dim(format!("B has {} rows, A has {}", b.rows(), n));
        }
        if c.cols() != n {
            return dim(format!("C has {} columns, A has {}", c.cols(), n));
        }
        if d.rows() != c.rows() || d.cols() != b.cols() {
            return dim(format!(
                "D is {}x{}, expected {}x{}",
                d.rows(),
                d.cols(),
                c.rows(),
                b.cols()
            ));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }
}

/// Jacobian of the equations of motion at hover, in closed form.
pub fn linearize(params: &QuadParams) -> StateSpace {
    let mut a = Matrix::zeros(6, 6);
    a[(0, 3)] = 1.0;
    a[(1, 4)] = 1.0;
    a[(2, 5)] = 1.0;
    // d(-u1 sin(phi)/m)/dphi at u1 = m g
    a[(3, 2)] = -params.g;

    let mut b = Matrix::zeros(6, 3);
    b[(4, 0)] = 1.0 / params.m;
    b[(4, 2)] = -1.0;
    b[(5, 1)] = 1.0 / params.j;

    let mut c = Matrix::zeros(2, 6);
    c[(0, 0)] = 1.0;
    c[(1, 1)] = 1.0;

    StateSpace {
        a,
        b,
        c,
        d: Matrix::zeros(2, 3),
    }
}

/// `A dx + B du` for the 6-state model, with `du = (du1, du2, dg)`.
///
/// Panics if `ss` is not 6-state / 3-input.
pub fn deriv_linear(delta_state: &State, delta_input: [f64; 3], ss: &StateSpace) -> StateDeriv {
    assert!(
        ss.states() == 6 && ss.inputs() == 3,
        "expected the 6-state, 3-input model"
    );
    let ax = ss.a.mul_vec(&delta_state.to_array());
    let bu = ss.b.mul_vec(&delta_input);
    let mut out = [0.0; 6];
    for (o, (p, q)) in out.iter_mut().zip(ax.iter().zip(&bu)) {
        *o = p + q;
    }
    StateDeriv::from_array(out)
}

/// Characteristic polynomial `det(sI - A)` and the matrices `M_1..M_n` with
/// `adj(sI - A) = sum_k M_k s^(n-k)`, by the Faddeev-LeVerrier recursion.
pub fn faddeev_leverrier(a: &Matrix) -> Result<(Polynomial, Vec<Matrix>), LinearModelError> {
    if !a.is_square() {
        return Err(LinearModelError::Dimension(format!(
            "A is {}x{}, expected square",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut coeffs = alloc::vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut adj = Vec::with_capacity(n);
    let mut m_prev = Matrix::zeros(n, n);
    for k in 1..=n {
        let m_k = a.mul(&m_prev).add_diagonal(coeffs[n - k + 1]);
        coeffs[n - k] = -a.mul(&m_k).trace() / k as f64;
        adj.push(m_k.clone());
        m_prev = m_k;
    }
    Ok((Polynomial::new(coeffs), adj))
}

/// Rows are outputs, columns are inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TfMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalTF>,
}

impl TfMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &RationalTF {
        assert!(row < self.rows && col < self.cols);
        &self.entries[row * self.cols + col]
    }

    fn labels(&self, row: usize, col: usize) -> (String, String) {
        if self.rows == 2 && self.cols == 3 {
            (OUTPUT_LABELS[row].into(), INPUT_LABELS[col].into())
        } else {
            (format!("y{row}"), format!("u{col}"))
        }
    }

    /// One line per entry: `H[out,in] = <human form>    num=[..] den=[..]`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (o, u) = self.labels(i, j);
                let tf = self.get(i, j);
                out.push_str(&format!("H[{o},{u}] = {tf}    {}\n", tf.coeff_string()));
            }
        }
        out
    }
}

impl fmt::Display for TfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Exact rational transfer-function matrix of `ss`, entries normalized.
pub fn tf_from_ss(ss: &StateSpace) -> Result<TfMatrix, LinearModelError> {
    let (den, adj) = faddeev_leverrier(&ss.a)?;
    let n = ss.states();
    // C M_k B for each k
    let cmb: Vec<Matrix> = adj.iter().map(|m| ss.c.mul(m).mul(&ss.b)).collect();
    let (rows, cols) = (ss.outputs(), ss.inputs());
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut coeffs = alloc::vec![0.0; n + 1];
            for (k, m) in cmb.iter().enumerate() {
                // M_{k+1} multiplies s^(n-k-1)
                coeffs[n - k - 1] = m[(i, j)];
            }
            let num = Polynomial::new(coeffs).add(&den.scale(ss.d[(i, j)]));
            entries.push(RationalTF::new(num, den.clone())?.normalized());
        }
    }
    Ok(TfMatrix {
        rows,
        cols,
        entries,
    })
}

/// Pole/zero structure of a rational function, split into the part at the
/// origin and the remaining factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    /// The function is identically zero; no poles or zeros are reported.
    pub identically_zero: bool,
    pub origin_poles: usize,
    /// Monic denominator factor left after removing `s^origin_poles`.
    pub other_poles: Polynomial,
    pub origin_zeros: usize,
    /// Numerator factor left after removing `s^origin_zeros`.
    pub other_zeros: Polynomial,
}

impl PoleReport {
    pub fn pole_count(&self) -> usize {
        self.origin_poles + self.other_poles.degree().unwrap_or(0)
    }

    pub fn zero_count(&self) -> usize {
        self.origin_zeros + self.other_zeros.degree().unwrap_or(0)
    }

    pub fn all_poles_at_origin(&self) -> bool {
        self.other_poles.degree() == Some(0)
    }
}

/// Degree bookkeeping on the normalized form; no root finding.
pub fn pole_report(tf: &RationalTF) -> PoleReport {
    let n = tf.normalized();
    if n.is_zero() {
        return PoleReport {
            identically_zero: true,
            origin_poles: 0,
            other_poles: Polynomial::constant(1.0),
            origin_zeros: 0,
            other_zeros: Polynomial::constant(1.0),
        };
    }
    let split = |p: &Polynomial| {
        let k = p.origin_multiplicity().unwrap_or(0);
        (k, Polynomial::new(p.coeffs()[k..].to_vec()))
    };
    let (origin_poles, other_poles) = split(n.den());
    let (origin_zeros, other_zeros) = split(n.num());
    PoleReport {
        identically_zero: false,
        origin_poles,
        other_poles,
        origin_zeros,
        other_zeros,
    }
}

/// Step response `K t^k / k!` of an integrator chain `K / s^k`.
pub fn analytic_step_response(
    tf: &RationalTF,
    times: &[f64],
) -> Result<Vec<f64>, LinearModelError> {
    let (gain, k) = integrator_chain_form(tf)?;
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    Ok(times
        .iter()
        .map(|&t| {
            let mut tk = 1.0;
            for _ in 0..k {
                tk *= t;
            }
            gain * tk / factorial
        })
        .collect())
}

/// `(K, k)` such that `tf == K / s^k`.
pub fn integrator_chain_form(tf: &RationalTF) -> Result<(f64, usize), LinearModelError> {
    let n = tf.normalized();
    if n.is_zero() {
        return Ok((0.0, 0));
    }
    let rep = pole_report(&n);
    if !rep.all_poles_at_origin() {
        return Err(LinearModelError::UnsupportedForm(format!(
            "poles away from the origin in {n}"
        )));
    }
    if n.num().degree() != Some(0) {
        return Err(LinearModelError::UnsupportedForm(format!(
            "numerator has zeros in {n}"
        )));
    }
    Ok((n.num().coeffs()[0], rep.origin_poles))
}

/// `coeff * m^m_pow * g^g_pow * J^j_pow / s^s_pow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolicGain {
    pub coeff: f64,
    pub m_pow: i32,
    pub g_pow: i32,
    pub j_pow: i32,
    pub s_pow: usize,
}

impl SymbolicGain {
    pub fn is_zero(&self) -> bool {
        self.coeff == 0.0
    }

    pub fn eval(&self, params: &QuadParams) -> f64 {
        self.coeff
            * libm::pow(params.m, self.m_pow as f64)
            * libm::pow(params.g, self.g_pow as f64)
            * libm::pow(params.j, self.j_pow as f64)
    }
}

impl fmt::Display for SymbolicGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut upper: Vec<String> = Vec::new();
        let mut lower: Vec<String> = Vec::new();
        for (sym, p) in [("m", self.m_pow), ("g", self.g_pow), ("J", self.j_pow)] {
            let term = |e: i32| {
                if e == 1 {
                    String::from(sym)
                } else {
                    format!("{sym}^{e}")
                }
            };
            if p > 0 {
                upper.push(term(p));
            } else if p < 0 {
                lower.push(term(-p));
            }
        }
        match self.s_pow {
            0 => {}
            1 => lower.push("s".into()),
            k => lower.push(format!("s^{k}")),
        }
        let mag = self.coeff.abs();
        if mag != 1.0 || upper.is_empty() {
            upper.insert(0, format_number(mag));
        }
        if self.coeff < 0.0 {
            f.write_str("-")?;
        }
        f.write_str(&upper.join(" "))?;
        match lower.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", lower[0]),
            _ => write!(f, "/({})", lower.join(" ")),
        }
    }
}

/// Recovers each entry of `H(s)` as a monomial in `(m, g, J)` by probing how
/// the numeric gain scales when each parameter is doubled.
pub fn symbolic_tf(params: &QuadParams) -> Result<Vec<Vec<SymbolicGain>>, LinearModelError> {
    if params.g <= 0.0 {
        return Err(LinearModelError::NotMonomial(
            "gravity must be positive to identify its exponent".into(),
        ));
    }
    let base = tf_from_ss(&linearize(params))?;
    let probes = [
        QuadParams {
            m: 2.0 * params.m,
            ..*params
        },
        QuadParams {
            g: 2.0 * params.g,
            ..*params
        },
        QuadParams {
            j: 2.0 * params.j,
            ..*params
        },
    ];
    let probed: Vec<TfMatrix> = probes
        .iter()
        .map(|p| tf_from_ss(&linearize(p)))
        .collect::<Result<_, _>>()?;

    let mut out = Vec::with_capacity(base.rows);
    for i in 0..base.rows {
        let mut row = Vec::with_capacity(base.cols);
        for j in 0..base.cols {
            let (k0, s_pow) = integrator_chain_form(base.get(i, j))?;
            if k0 == 0.0 {
                row.push(SymbolicGain {
                    coeff: 0.0,
                    m_pow: 0,
                    g_pow: 0,
                    j_pow: 0,
                    s_pow: 0,
                });
                continue;
            }
            let mut pows = [0i32; 3];
            for (slot, tfm) in pows.iter_mut().zip(&probed) {
                let (k1, s1) = integrator_chain_form(tfm.get(i, j))?;
                if s1 != s_pow || k1 == 0.0 || (k1 < 0.0) != (k0 < 0.0) {
                    return Err(LinearModelError::NotMonomial(format!("entry ({i},{j})")));
                }
                let e = log2(k1 / k0);
                let r = round(e);
                if (e - r).abs() > 1e-9 {
                    return Err(LinearModelError::NotMonomial(format!("entry ({i},{j})")));
                }
                *slot = r as i32;
            }
            let mut g = SymbolicGain {
                coeff: 1.0,
                m_pow: pows[0],
                g_pow: pows[1],
                j_pow: pows[2],
                s_pow,
            };
            g.coeff = k0 / g.eval(params);
            row.push(g);
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{deriv_nonlinear, equilibrium, Input};
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn linearize_structure() {
        let ss = linearize(&QuadParams::default());
        assert_eq!(ss.a()[(3, 2)], -9.8);
        assert_eq!(ss.b()[(5, 1)], 4000.0);
        assert!(rel_close(ss.b()[(4, 0)], 50.0 / 9.0, 1e-15));
        assert_eq!(ss.b()[(4, 2)], -1.0);
        assert!(ss.d().is_zero());
        let nonzero_a: usize = (0..6)
            .flat_map(|i| (0..6).map(move |j| (i, j)))
            .filter(|&(i, j)| ss.a()[(i, j)] != 0.0)
            .count();
        assert_eq!(nonzero_a, 4);
    }

    /// Central differences of the nonlinear model at hover, step 1e-6.
    #[test]
    fn jacobian_matches_finite_differences() {
        let p = QuadParams::default();
        let ss = linearize(&p);
        let (x0, u0) = equilibrium(&p);
        let h = 1e-6;
        let f = |x: [f64; 6], u: [f64; 3]| {
            let q = QuadParams { g: u[2], ..p };
            deriv_nonlinear(&State::from_array(x), Input::new(u[0], u[1]), &q).to_array()
        };
        let base_u = [u0.u1, u0.u2, p.g];
        for j in 0..6 {
            let (mut xp, mut xm) = (x0.to_array(), x0.to_array());
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(xp, base_u), f(xm, base_u));
            for i in 0..6 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - ss.a()[(i, j)]).abs() <= 1e-6, "A[{i}][{j}]: {fd}");
            }
        }
        for j in 0..3 {
            let (mut up, mut um) = (base_u, base_u);
            up[j] += h;
            um[j] -= h;
            let (fp, fm) = (f(x0.to_array(), up), f(x0.to_array(), um));
            for i in 0..6 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                assert!((fd - ss.b()[(i, j)]).abs() <= 1e-6, "B[{i}][{j}]: {fd}");
            }
        }
    }

    #[test]
    fn linear_derivative_examples() {
        let ss = linearize(&QuadParams::default());
        assert_eq!(
            deriv_linear(&State::ZERO, [0.0; 3], &ss).to_array(),
            [0.0; 6]
        );
        let d = deriv_linear(
            &State {
                phi: 0.1,
                ..State::ZERO
            },
            [0.0; 3],
            &ss,
        );
        assert!((d.vx_dot + 0.98).abs() < 1e-15);
        let d = deriv_linear(&State::ZERO, [0.0, 1.0, 0.0], &ss);
        assert_eq!(d.omega_dot, 4000.0);
        // thrust acts through 1/m on the vertical channel
        let d = deriv_linear(&State::ZERO, [1.0, 0.0, 0.0], &ss);
        assert!(rel_close(d.vy_dot, 1.0 / 0.18, 1e-15));
    }

    #[test]
    fn characteristic_polynomial_is_s6() {
        let (den, _) = faddeev_leverrier(linearize(&QuadParams::default()).a()).unwrap();
        assert_eq!(den.coeffs(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn faddeev_leverrier_on_diagonal() {
        // det(sI - diag(1,2)) = s^2 - 3s + 2, adj = [[s-2,0],[0,s-1]]
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let (den, adj) = faddeev_leverrier(&a).unwrap();
        assert_eq!(den.coeffs(), &[2.0, -3.0, 1.0]);
        assert_eq!(adj[0], Matrix::identity(2));
        assert_eq!(adj[1], Matrix::from_rows(&[&[-2.0, 0.0], &[0.0, -1.0]]));
    }

    #[test]
    fn tf_of_first_order_system() {
        // dx = -2x + u, y = 3x + u  =>  H = 3/(s+2) + 1 = (s + 5)/(s + 2)
        let ss = StateSpace::new(
            Matrix::from_rows(&[&[-2.0]]),
            Matrix::from_rows(&[&[1.0]]),
            Matrix::from_rows(&[&[3.0]]),
            Matrix::from_rows(&[&[1.0]]),
        )
        .unwrap();
        let h = tf_from_ss(&ss).unwrap();
        assert_eq!(h.get(0, 0).num().coeffs(), &[5.0, 1.0]);
        assert_eq!(h.get(0, 0).den().coeffs(), &[2.0, 1.0]);
        let rep = pole_report(h.get(0, 0));
        assert_eq!(rep.origin_poles, 0);
        assert!(!rep.all_poles_at_origin());
        assert!(analytic_step_response(h.get(0, 0), &[1.0]).is_err());
    }

    #[test]
    fn quadrotor_tf_matrix() {
        let h = tf_from_ss(&linearize(&QuadParams::default())).unwrap();
        assert_eq!((h.rows(), h.cols()), (2, 3));
        assert!(h.get(0, 0).is_zero());
        assert!(h.get(0, 2).is_zero());
        assert!(h.get(1, 1).is_zero());
        assert_eq!(integrator_chain_form(h.get(0, 1)).unwrap(), (-39200.0, 4));
        let (k, s) = integrator_chain_form(h.get(1, 0)).unwrap();
        assert!(rel_close(k, 50.0 / 9.0, 1e-12));
        assert_eq!(s, 2);
        assert_eq!(integrator_chain_form(h.get(1, 2)).unwrap(), (-1.0, 2));
        assert_eq!(h.get(0, 1).to_string(), "-39200 / s^4");
        assert!(h.render().contains("H[x,u2] = -39200 / s^4"));
    }

    #[test]
    fn dimension_errors() {
        let err = StateSpace::new(
            Matrix::zeros(2, 3),
            Matrix::zeros(2, 1),
            Matrix::zeros(1, 2),
            Matrix::zeros(1, 1),
        );
        assert!(matches!(err, Err(LinearModelError::Dimension(_))));
        let err = StateSpace::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(3, 1),
            Matrix::zeros(1, 2),
            Matrix::zeros(1, 1),
        );
        assert!(matches!(err, Err(LinearModelError::Dimension(_))));
        assert!(faddeev_leverrier(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pole_report_examples() {
        let rep = pole_report(&RationalTF::integrator_chain(-39200.0, 4));
        assert_eq!(rep.origin_poles, 4);
        assert_eq!(rep.zero_count(), 0);
        assert!(rep.all_poles_at_origin());

        let rep = pole_report(&RationalTF::integrator_chain(50.0 / 9.0, 2));
        assert_eq!((rep.origin_poles, rep.zero_count()), (2, 0));

        let rep = pole_report(&RationalTF::integrator_chain(1.0, 0));
        assert_eq!((rep.pole_count(), rep.zero_count()), (0, 0));

        let rep = pole_report(&RationalTF::zero());
        assert!(rep.identically_zero);
    }

    #[test]
    fn step_response_examples() {
        let x = analytic_step_response(&RationalTF::integrator_chain(-39200.0, 4), &[0.0, 0.1])
            .unwrap();
        assert_eq!(x[0], 0.0);
        assert!(rel_close(x[1], -39200.0 * 1e-4 / 24.0, 1e-12));
        assert!((x[1] + 0.16333).abs() < 1e-5);

        let y =
            analytic_step_response(&RationalTF::integrator_chain(50.0 / 9.0, 2), &[1.0]).unwrap();
        assert!((y[0] - 50.0 / 18.0).abs() < 1e-12);

        let z = analytic_step_response(&RationalTF::zero(), &[0.0, 3.0]).unwrap();
        assert_eq!(z, vec![0.0, 0.0]);
    }

    #[test]
    fn symbolic_entries() {
        let sym = symbolic_tf(&QuadParams::default()).unwrap();
        let text: Vec<Vec<String>> = sym
            .iter()
            .map(|r| r.iter().map(|g| g.to_string()).collect())
            .collect();
        assert_eq!(text[0], vec!["0", "-g/(J s^4)", "0"]);
        assert_eq!(text[1], vec!["1/(m s^2)", "0", "-1/s^2"]);
        assert_eq!(sym[0][1].g_pow, 1);
        assert_eq!(sym[0][1].j_pow, -1);
        assert!(symbolic_tf(&QuadParams {
            g: 0.0,
            ..QuadParams::default()
        })
        .is_err());
    }

    proptest! {
        #[test]
        fn pole_structure_independent_of_parameters(
            m in 0.01f64..10.0, g in 0.1f64..30.0, l in 0.01f64..1.0, j in 1e-6f64..1.0,
        ) {
            let p = QuadParams::new(m, g, l, j).unwrap();
            let h = tf_from_ss(&linearize(&p)).unwrap();
            let expected = [[None, Some(4), None], [Some(2), None, Some(2)]];
            for (i, row) in expected.iter().enumerate() {
                for (c, want) in row.iter().enumerate() {
                    let rep = pole_report(h.get(i, c));
                    match want {
                        None => prop_assert!(rep.identically_zero),
                        Some(k) => {
                            prop_assert_eq!(rep.origin_poles, *k);
                            prop_assert!(rep.all_poles_at_origin());
                            prop_assert_eq!(rep.zero_count(), 0);
                        }
                    }
                }
            }
            let (k, _) = integrator_chain_form(h.get(0, 1)).unwrap();
            prop_assert!(rel_close(k, -g / j, 1e-12));
        }
    }
}
