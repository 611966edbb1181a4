use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use oppnet::metrics::{polyfit2, polyval2, FitError};
use proptest::prelude::*;

fn q(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn det3(m: &[[BigRational; 3]; 3]) -> BigRational {
    let t = |a: &BigRational, b: &BigRational| a * b;
    t(&m[0][0], &(t(&m[1][1], &m[2][2]) - t(&m[1][2], &m[2][1])))
        - t(&m[0][1], &(t(&m[1][0], &m[2][2]) - t(&m[1][2], &m[2][0])))
        + t(&m[0][2], &(t(&m[1][0], &m[2][1]) - t(&m[1][1], &m[2][0])))
}

/// Raw-x normal equations solved exactly by Cramer's rule.
fn exact_fit(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    let mut s = vec![BigRational::zero(); 5];
    let mut r = vec![BigRational::zero(); 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let (x, y) = (q(x), q(y));
        let mut p = BigRational::from_integer(BigInt::from(1));
        for k in 0..5 {
            s[k] += &p;
            if k < 3 {
                r[k] += &p * &y;
            }
            p = &p * &x;
        }
    }
    let m: [[BigRational; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| s[i + j].clone()));
    let d = det3(&m);
    std::array::from_fn(|col| {
        let mut mc = m.clone();
        for row in 0..3 {
            mc[row][col] = r[row].clone();
        }
        (det3(&mc) / &d).to_f64().unwrap()
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn delivery_versus_range_matches_exact_solve() {
    let xs: Vec<f64> = (1..=13).map(|i| 300.0 * i as f64).collect();
    let ys = [
        0.0206, 0.0208, 0.0261, 0.0464, 0.0361, 0.0361, 0.0619, 0.0742, 0.067, 0.1134, 0.1194, 0.1186, 0.1495,
    ];
    let got = polyfit2(&xs, &ys).unwrap();
    let want = exact_fit(&xs, &ys);
    for k in 0..3 {
        // relative to each coefficient's own magnitude
        assert!((got[k] - want[k]).abs() <= 1e-9 * want[k].abs(), "coef {k}: {} vs {}", got[k], want[k]);
    }
    assert!(want[2] > 0.0);
}

#[test]
fn straight_line_has_no_curvature() {
    let xs: Vec<f64> = (0..7).map(f64::from).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 1.5 + 0.25 * x).collect();
    let c = polyfit2(&xs, &ys).unwrap();
    assert!(c[2].abs() < 1e-9);
    assert!(close(c[1], 0.25, 1e-9) && close(c[0], 1.5, 1e-9));
}

#[test]
fn two_rows_are_rejected() {
    assert_eq!(polyfit2(&[1.0, 2.0], &[1.0, 2.0]), Err(FitError::TooFewPoints(2)));
}

fn sse(xs: &[f64], ys: &[f64], c: &[f64; 3]) -> f64 {
    xs.iter().zip(ys).map(|(&x, &y)| (polyval2(c, x) - y).powi(2)).sum()
}

proptest! {
    #[test]
    fn planted_quadratics_are_recovered(
        a in -10.0f64..10.0,
        b in -1.0f64..1.0,
        c in -0.01f64..0.01,
        x0 in -500.0f64..500.0,
        dx in 1.0f64..50.0,
        n in 3usize..30,
    ) {
        let xs: Vec<f64> = (0..n).map(|i| x0 + dx * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| a + b * x + c * x * x).collect();
        let got = polyfit2(&xs, &ys).unwrap();
        let scale = xs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!((got[0] - a).abs() <= 1e-9 * (1.0 + a.abs() + b.abs() * scale + c.abs() * scale * scale));
        prop_assert!((got[1] - b).abs() * scale <= 1e-9 * (1.0 + b.abs() * scale + c.abs() * scale * scale));
        prop_assert!((got[2] - c).abs() * scale * scale <= 1e-9 * (1.0 + c.abs() * scale * scale));
    }

    #[test]
    fn quadratic_residual_beats_lower_orders(ys in proptest::collection::vec(-5.0f64..5.0, 4..20)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| 100.0 * i as f64).collect();
        let quad = polyfit2(&xs, &ys).unwrap();
        let m = ys.iter().sum::<f64>() / ys.len() as f64;
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - m)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let line = [m - slope * mx, slope, 0.0];
        let r = sse(&xs, &ys, &quad);
        prop_assert!(r <= sse(&xs, &ys, &[m, 0.0, 0.0]) + 1e-9);
        prop_assert!(r <= sse(&xs, &ys, &line) + 1e-9);
    }
}
