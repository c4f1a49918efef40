//! Acceptance suite. Each test prints one `PASS`/`FAIL` line to the real
//! stderr handle (bypassing the harness capture) before asserting.
//!
//! Expected values were computed by `tools/oracle.py` (mpmath and integer
//! lattice scans) and are frozen here.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use flatsurf_core::asymptotics::{
    circle_average_check, predicted_constant, sum_identity_check, Prediction, Signs,
};
use flatsurf_core::builders::triangle_p;
use flatsurf_core::census::CylinderCensus;
use flatsurf_core::veech::{gamma_n, sl2z_calibration, stabilizes};
use flatsurf_core::{
    build, cylinders_up_to, decompose, unfold, Family, Mat2, RationalPolygonSpec, Sl2Kind, Vec2,
};

// tolerances
const HW_REL: f64 = 1e-6;
const MODULUS_ABS: f64 = 1e-8;
const AREA_SUM_REL: f64 = 1e-8;
const IDENTITY_ABS: f64 = 1e-9;
const TORUS_REL: f64 = 0.03;
const X5_REL: f64 = 0.10;
const S5_REL: f64 = 0.12;
const DECOMP_REL: f64 = 1e-6;
const CLASS_RATIO_REL: f64 = 0.10;
const CIRCLE_BRACKET: (f64, f64) = (0.6, 1.6);

// oracle values
const X5_CONSTANT: f64 = 0.5578180348730637;
const S5_CONSTANT: f64 = 1.227_199_676_720_74;
const P5_COEFFICIENT: f64 = 0.5835681246702829;
const SQUARE_CONSTANT: f64 = 0.477464829275686;
const PRIMITIVE_UP_TO_50: usize = 4776;
const CLASS_RATIO: f64 = 2.618_033_988_749_895;
const SL2Z_AT_10: usize = 192;
const SL2Z_RAW_AT_10: f64 = 95.492_965_855_137_2;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let mut err = std::io::stderr().lock();
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(err, "[{tag}] criterion {id:>2} {name}: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn heights_widths(n: u32) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (1..=(n - 1) / 2)
        .map(|j| {
            let s = (PI * (2 * j - 1) as f64 / nf).sin();
            (4.0 * s * (PI / nf).cos(), 2.0 * s * (PI / nf).sin())
        })
        .collect()
}

fn x5_census() -> &'static CylinderCensus {
    static C: OnceLock<CylinderCensus> = OnceLock::new();
    C.get_or_init(|| cylinders_up_to(&build(Family::Xn, 5).unwrap(), 40.0).unwrap())
}

#[test]
fn c01_topology() {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    // a few images under SL(2,R) must carry the same invariants
    let moves = [
        Mat2::IDENTITY,
        flatsurf_core::geom::sl2_element(Sl2Kind::DiagT, 0.7).unwrap(),
        Mat2::new(1.0, 0.37, 0.0, 1.0) * Mat2::rotation(1.1),
    ];
    for n in [5u32, 7, 9] {
        let x = build(Family::Xn, n).unwrap();
        let s = build(Family::Sn, n).unwrap();
        for g in &moves {
            let (x, s) = (x.apply_matrix(g).unwrap(), s.apply_matrix(g).unwrap());
            let sx = x.stratum().unwrap();
            let gx = x.genus().unwrap();
            let mut ss = s.stratum().unwrap();
            ss.sort_unstable();
            let gs = s.genus().unwrap();
            let mut want = vec![1, 1, n - 3, n - 3];
            want.sort_unstable();
            let gb_x = sx.iter().sum::<u32>() == 2 * gx - 2;
            let gb_s = ss.iter().sum::<u32>() == 2 * gs - 2;
            let case = sx == vec![n - 3] && gx == (n - 1) / 2 && ss == want && gs == n - 1 && gb_x && gb_s;
            if !case {
                notes.push(format!("n={n}: X {sx:?} g={gx}, S {ss:?} g={gs}"));
            }
            ok &= case;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    report(
        1,
        "topology",
        ok,
        format!("n in {{5,7,9}}, 3 SL2 images each, {secs:.2}s {notes:?}"),
    );
    assert!(ok);
}

#[test]
fn c02_heights_widths() {
    let start = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in [5u32, 7, 9] {
        let x = build(Family::Xn, n).unwrap();
        let d = decompose(&x, Vec2::new(0.0, 1.0), 100.0).unwrap();
        let mut got: Vec<(f64, f64)> = d.cylinders.iter().map(|c| (c.circumference, c.width)).collect();
        let mut want = heights_widths(n);
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        want.sort_by(|a, b| a.0.total_cmp(&b.0));
        ok &= got.len() == want.len();
        for ((h, w), (h0, w0)) in got.iter().zip(&want) {
            worst = worst.max(rel(*h, *h0)).max(rel(*w, *w0));
            ok &= rel(*h, *h0) <= HW_REL && rel(*w, *w0) <= HW_REL;
            ok &= (h / w - 2.0 / (PI / n as f64).tan()).abs() <= MODULUS_ABS;
        }
        ok &= rel(d.total_area(), x.area()) <= AREA_SUM_REL;
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    report(
        2,
        "heights and widths",
        ok,
        format!("worst relative error {worst:.2e}, {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn c03_veech_elements() {
    let start = Instant::now();
    let mut ok = true;
    for n in [5u32, 7] {
        let x = build(Family::Xn, n).unwrap();
        for g in gamma_n(n).unwrap().generators {
            ok &= stabilizes(&g, &x).unwrap();
        }
    }
    let x5 = build(Family::Xn, 5).unwrap();
    let a1 = flatsurf_core::geom::sl2_element(Sl2Kind::DiagT, 1.0).unwrap();
    let rejected = !stabilizes(&a1, &x5).unwrap();
    ok &= rejected;
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 30.0;
    report(
        3,
        "veech elements",
        ok,
        format!("u_n, r_(2pi/n) stabilize for n=5,7; a_1 rejected={rejected}; {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn c04_identity() {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in [3u32, 5, 7, 9, 11] {
        let (l, r) = sum_identity_check(n).unwrap();
        worst = worst.max((l - r).abs());
        ok &= (l - r).abs() <= IDENTITY_ABS;
    }
    report(4, "sine identity", ok, format!("max |lhs - rhs| = {worst:.2e}"));
    assert!(ok);
}

#[test]
fn c05_torus_counting() {
    let start = Instant::now();
    let s = unfold(&RationalPolygonSpec::unit_square()).unwrap();
    let c = cylinders_up_to(&s, 100.0).unwrap();
    let n = c.count(100.0);
    let v = n as f64 / 1e4;
    let target = predicted_constant(Prediction::Torus { area: 4.0 }).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok = rel(target, SQUARE_CONSTANT) < 1e-12
        && n == PRIMITIVE_UP_TO_50
        && rel(v, target) <= TORUS_REL
        && c.skipped.is_empty()
        && secs < 60.0;
    report(
        5,
        "unfolded square",
        ok,
        format!("N(100) = {n} (lattice {PRIMITIVE_UP_TO_50}), N/T^2 = {v:.6} vs {target:.6}, {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn c06_x5_constant() {
    let start = Instant::now();
    let c = x5_census();
    let target = predicted_constant(Prediction::Xn { n: 5 }).unwrap();
    let signs = Prediction::Xn { n: 5 }.signs();
    let at = |t: f64| signs.from_signed(c.count(t)) as f64 / (t * t);
    let (v20, v40) = (at(20.0), at(40.0));
    let both = Signs::Both.from_signed(c.count(40.0)) as f64 / 1600.0;
    let secs = start.elapsed().as_secs_f64();
    let ok = rel(target, X5_CONSTANT) < 1e-12
        && rel(v40, target) <= X5_REL
        && (v40 - target).abs() < (v20 - target).abs()
        && c.skipped.is_empty()
        && secs < 600.0;
    report(
        6,
        "X_5 constant",
        ok,
        format!(
            "N/T^2 per cylinder: T=20 {v20:.5}, T=40 {v40:.5} vs {target:.6} (ratio {:.4}); counting both signs gives {both:.5}; {secs:.2}s",
            v40 / target
        ),
    );
    assert!(ok);
}

#[test]
fn c07_s5_constant() {
    let start = Instant::now();
    let s5 = build(Family::Sn, 5).unwrap();
    let c = cylinders_up_to(&s5, 40.0).unwrap();
    let target = predicted_constant(Prediction::Sn { n: 5 }).unwrap();
    let n = Prediction::Sn { n: 5 }.signs().from_signed(c.count(40.0));
    let v = n as f64 / 1600.0;
    let area_p = triangle_p(5).unwrap().area();
    let vp = n as f64 * area_p / 1600.0;
    let secs = start.elapsed().as_secs_f64();
    let ok = rel(target, S5_CONSTANT) < 1e-12
        && rel(
            predicted_constant(Prediction::Pn { n: 5 }).unwrap() * area_p,
            P5_COEFFICIENT,
        ) < 1e-12
        && rel(v, target) <= S5_REL
        && rel(vp, P5_COEFFICIENT) <= S5_REL
        && secs < 1800.0;
    report(
        7,
        "S_5 constant",
        ok,
        format!(
            "N(40)/T^2 = {v:.5} vs {target:.6} (ratio {:.4}); N*area(P_5)/T^2 = {vp:.5} vs {P5_COEFFICIENT:.6}; {} non-periodic directions skipped; {secs:.2}s",
            v / target,
            c.skipped.len()
        ),
    );
    assert!(ok);
}

/// `{h_k, h_k, 2h_k, 2h_k, h_j, h_j}` with `k` read off from the doubled pair.
fn cover_pattern(lengths: &[f64], h: &[f64; 2]) -> Option<usize> {
    if lengths.len() != 6 {
        return None;
    }
    (0..2).find(|&k| {
        let j = 1 - k;
        let mut want = vec![h[k], h[k], 2.0 * h[k], 2.0 * h[k], h[j], h[j]];
        want.sort_by(f64::total_cmp);
        lengths.iter().zip(&want).all(|(a, b)| rel(*a, *b) <= DECOMP_REL)
    })
}

#[test]
fn c08_cover_decomposition() {
    let start = Instant::now();
    let g = gamma_n(5).unwrap();
    let (u, r) = (g.generators[0], g.generators[1]);
    let hw = heights_widths(5);
    let h = [hw[0].0, hw[1].0];
    let s5 = build(Family::Sn, 5).unwrap();
    let words: Vec<(&str, Mat2)> = vec![
        ("u", u),
        ("r", r),
        ("ur", u * r),
        ("ru", r * u),
        ("uu", u * u),
        ("urr", u * r * r),
        ("rur", r * u * r),
        ("u^-1 r", u.inverse() * r),
        ("ruur", r * u * u * r),
    ];
    let mut ok = true;
    let mut seen = Vec::new();
    for (name, m) in &words {
        let y = s5.apply_matrix(m).unwrap();
        let d = decompose(&y, Vec2::new(0.0, 1.0), 100.0).unwrap();
        let mut l: Vec<f64> = d.cylinders.iter().map(|c| c.circumference).collect();
        l.sort_by(f64::total_cmp);
        match cover_pattern(&l, &h) {
            Some(k) => seen.push(format!("{name}:k={}", k + 1)),
            None => {
                ok = false;
                seen.push(format!("{name}:{l:?}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= words.len() >= 5 && secs < 300.0;
    report(
        8,
        "cover decomposition",
        ok,
        format!("{} words [{}], {secs:.2}s", words.len(), seen.join(" ")),
    );
    assert!(ok);
}

#[test]
fn c09_orbit_classes() {
    let c = x5_census();
    let hw = heights_widths(5);
    let a1 = hw[0].0 * hw[0].1;
    let a2 = hw[1].0 * hw[1].1;
    let n1 = c.cylinders.iter().filter(|x| rel(x.area, a1) < 1e-6).count();
    let n2 = c.cylinders.iter().filter(|x| rel(x.area, a2) < 1e-6).count();
    let ratio = n1 as f64 / n2 as f64;
    let ok = rel(a2 / a1, CLASS_RATIO) < 1e-12
        && n1 + n2 == c.cylinders.len()
        && rel(ratio, CLASS_RATIO) <= CLASS_RATIO_REL;
    report(
        9,
        "orbit classes",
        ok,
        format!("{n1} of area {a1:.5}, {n2} of area {a2:.5}: ratio {ratio:.4} vs {CLASS_RATIO:.6}"),
    );
    assert!(ok);
}

#[test]
fn c10_lattice_calibration() {
    let start = Instant::now();
    let k4 = sl2z_calibration(10.0, 4.0).unwrap();
    let k8 = sl2z_calibration(10.0, 8.0).unwrap();
    let raw = k4.predicted.unwrap();
    let factor = k4.ratio().unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ok =
        k4.count == SL2Z_AT_10 && k8.count == SL2Z_AT_10 && rel(raw, SL2Z_RAW_AT_10) < 1e-12 && secs < 30.0;
    report(
        10,
        "lattice calibration",
        ok,
        format!(
            "count {} (K=4), {} (K=8); formula {raw:.4}; count/formula = {factor:.4}; {secs:.2}s",
            k4.count, k8.count
        ),
    );
    assert!(ok);
}

#[test]
fn c11_circle_average() {
    let start = Instant::now();
    let torus = circle_average_check(&build(Family::SquareTorus, 0).unwrap(), 8.0, 3600).unwrap();
    let x5 = circle_average_check(&build(Family::Xn, 5).unwrap(), 12.0, 3600).unwrap();
    let inside = |r: Option<f64>| r.is_some_and(|r| (CIRCLE_BRACKET.0..=CIRCLE_BRACKET.1).contains(&r));
    let secs = start.elapsed().as_secs_f64();
    let ok = inside(torus.ratio) && inside(x5.ratio) && secs < 600.0;
    report(
        11,
        "circle average",
        ok,
        format!(
            "torus T=8 {}/{:.3} = {:.4}; X_5 T=12 {}/{:.3} = {:.4}; {secs:.2}s",
            torus.lhs,
            torus.rhs,
            torus.ratio.unwrap_or(f64::NAN),
            x5.lhs,
            x5.rhs,
            x5.ratio.unwrap_or(f64::NAN)
        ),
    );
    assert!(ok);
}
