use planarquad_core::linear_model::symbolic_tf;
use planarquad_core::{linearize, pole_report, tf_from_ss, QuadParams, StateSpace};

/// `C (sI - A)^-1 B` at a real `s` by Gaussian elimination with partial pivoting.
fn resolvent_gain(ss: &StateSpace, s: f64) -> Vec<Vec<f64>> {
    let n = ss.states();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| if i == j { s } else { 0.0 } - ss.a()[(i, j)])
                .collect();
            row.extend((0..ss.inputs()).map(|j| ss.b()[(i, j)]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .unwrap();
        aug.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                let pivot_row = aug[col].clone();
                for (v, p) in aug[r].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
    }
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| aug[i][n..].iter().map(|v| v / aug[i][i]).collect())
        .collect();
    (0..ss.outputs())
        .map(|o| {
            (0..ss.inputs())
                .map(|j| (0..n).map(|k| ss.c()[(o, k)] * x[k][j]).sum::<f64>() + ss.d()[(o, j)])
                .collect()
        })
        .collect()
}

#[test]
fn tf_matches_direct_resolvent() {
    for p in [
        QuadParams::default(),
        QuadParams::new(0.5, 9.81, 0.2, 1e-3).unwrap(),
        QuadParams::new(1.3, 3.7, 0.4, 0.02).unwrap(),
    ] {
        let ss = linearize(&p);
        let h = tf_from_ss(&ss).unwrap();
        for s in [0.7, 1.9, -2.3, 5.0] {
            let direct = resolvent_gain(&ss, s);
            for (i, row) in direct.iter().enumerate() {
                for (j, &want) in row.iter().enumerate() {
                    let got = h.get(i, j).eval(s);
                    assert!(
                        (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                        "H[{i},{j}]({s}) = {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn quadrotor_tf_entries() {
    let p = QuadParams::default();
    let h = tf_from_ss(&linearize(&p)).unwrap();
    let render = h.render();
    assert!(render.contains("H[x,u2] = -39200 / s^4"), "{render}");
    assert!(render.contains("H[y,g] = -1 / s^2"), "{render}");
    assert!(h.get(0, 0).is_zero() && h.get(0, 2).is_zero() && h.get(1, 1).is_zero());
    assert!((h.get(1, 0).eval(2.0) - 50.0 / 9.0 / 4.0).abs() < 1e-12);

    let r = pole_report(h.get(0, 1));
    assert_eq!(r.origin_poles, 4);
    assert!(r.all_poles_at_origin());
    assert_eq!(r.zero_count(), 0);

    let sym = symbolic_tf(&p).unwrap();
    assert_eq!(sym[0][1].to_string(), "-g/(J s^4)");
    assert_eq!(sym[1][0].to_string(), "1/(m s^2)");
}
