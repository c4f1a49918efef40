//! Library values against numbers frozen from `tools/oracle.py`.

use approx::assert_relative_eq;
use flatsurf_core::asymptotics::{
    area_xn, cover_constant_split, heights_widths, predicted_constant, sum_identity_check, sv_transform,
    CountKind, Prediction, Region,
};
use flatsurf_core::builders::triangle_p;
use flatsurf_core::geom::sl2_element;
use flatsurf_core::{build, saddle_connections, Family, Sl2Kind, Vec2};

// (h_j, w_j) for n = 5, 7, 9
const HW: [&[(f64, f64)]; 3] = [
    &[
        (1.902_113_032_590_307, 0.690_983_005_625_052_5),
        (3.0776835371752534, 1.118_033_988_749_895),
    ],
    &[
        (1.5636629649360596, 0.37651019814126647),
        (3.513_518_789_299_707, 0.846_010_735_815_047_9),
        (2.8176233025987635, 0.678_447_933_946_104_7),
    ],
    &[
        (1.2855752193730787, 0.23395555688102196),
        (3.2551907253974948, 0.592_396_265_452_047_7),
        (3.7016663135932934, 0.673_648_177_666_930_3),
        (2.416_091_094_220_215, 0.439_692_620_785_908_4),
    ],
];
const AREA_X: [f64; 3] = [
    4.755_282_581_475_768,
    5.472_820_377_276_209,
    5.785_088_487_178_854,
];
const C_X: [f64; 3] = [0.5578180348730637, 1.1399741521038827, 2.1222954611200676];
const C_S: [f64; 3] = [1.227_199_676_720_74, 2.4020883919331813, 4.386_077_286_314_807];
const P_COEFF: [f64; 3] = [0.5835681246702829, 0.939_014_164_242_182_4, 1.4096580673853587];

#[test]
fn heights_and_areas() {
    for (i, n) in [5u32, 7, 9].into_iter().enumerate() {
        for ((h, w), (h0, w0)) in heights_widths(n).iter().zip(HW[i]) {
            assert_relative_eq!(*h, *h0, max_relative = 1e-14);
            assert_relative_eq!(*w, *w0, max_relative = 1e-14);
        }
        assert_relative_eq!(area_xn(n), AREA_X[i], max_relative = 1e-14);
        assert_relative_eq!(
            build(Family::Xn, n).unwrap().area(),
            AREA_X[i],
            max_relative = 1e-12
        );
    }
}

#[test]
fn constants() {
    for (i, n) in [5u32, 7, 9].into_iter().enumerate() {
        assert_relative_eq!(
            predicted_constant(Prediction::Xn { n }).unwrap(),
            C_X[i],
            max_relative = 1e-13
        );
        assert_relative_eq!(
            predicted_constant(Prediction::Sn { n }).unwrap(),
            C_S[i],
            max_relative = 1e-13
        );
        let area_p = triangle_p(n).unwrap().area();
        assert_relative_eq!(
            predicted_constant(Prediction::Pn { n }).unwrap() * area_p,
            P_COEFF[i],
            max_relative = 1e-13
        );
        let (l, r) = cover_constant_split(n).unwrap();
        assert_relative_eq!(l, r, max_relative = 1e-12);
    }
    assert_relative_eq!(
        predicted_constant(Prediction::Torus { area: 1.0 }).unwrap(),
        1.909859317102744,
        max_relative = 1e-14
    );
}

#[test]
fn areas_of_covers() {
    for n in [5u32, 7, 9] {
        let s = build(Family::Sn, n).unwrap();
        let x = build(Family::Xn, n).unwrap();
        let p = triangle_p(n).unwrap();
        assert_relative_eq!(s.area(), 2.0 * x.area(), max_relative = 1e-9);
        assert_relative_eq!(s.area(), 4.0 * n as f64 * p.area(), max_relative = 1e-9);
    }
}

#[test]
fn identity_values() {
    for (n, v) in [(3u32, 4.0 / 3.0), (5, 4.0), (7, 8.0), (9, 40.0 / 3.0), (11, 20.0)] {
        let (l, r) = sum_identity_check(n).unwrap();
        assert!((l - v).abs() <= 1e-12 && (r - v).abs() <= 1e-12);
    }
}

#[test]
fn lattice_counts() {
    let t = build(Family::SquareTorus, 0).unwrap();
    for (r, want) in [(2.5, 16usize), (7.5, 104), (10.0, 192)] {
        assert_eq!(saddle_connections(&t, r).unwrap().len(), want);
    }
    assert_eq!(
        sv_transform(&t, Region::Trapezoid, CountKind::Cylinders).unwrap(),
        2.0
    );
    assert_eq!(
        sv_transform(&t, Region::Disc { radius: 0.01 }, CountKind::Cylinders).unwrap(),
        0.0
    );
}

#[test]
fn unipotent_moves_perpendicular() {
    let u = sl2_element(Sl2Kind::VeechUnipotent, 5.0).unwrap();
    assert_relative_eq!(u.c, 2.752_763_840_942_347, max_relative = 1e-14);
    let (h1, w1) = HW[0][0];
    let v = u.apply(Vec2::new(w1, 0.0));
    assert_relative_eq!(v.x, w1, max_relative = 1e-14);
    assert_relative_eq!(v.y, h1, max_relative = 1e-13);
}
