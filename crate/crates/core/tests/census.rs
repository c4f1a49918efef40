use approx::assert_relative_eq;

use flatsurf_core::asymptotics::{
    count_series, heights_widths, predicted_constant, short_cylinders_in_class, telescoped_count, CountKind,
    Prediction, Signs,
};
use flatsurf_core::census::cylinders_up_to_with;
use flatsurf_core::census::CylinderOptions;
use flatsurf_core::geom::sl2_element;
use flatsurf_core::surface::delaunay;
use flatsurf_core::veech::gamma_n;
use flatsurf_core::{build, cylinders_up_to, decompose, saddle_connections, Family, Sl2Kind, Vec2};

#[test]
fn square_torus_matches_lattice() {
    let t = build(Family::SquareTorus, 0).unwrap();
    let s = count_series(&t, CountKind::Cylinders, &[10.0, 50.0], Signs::Both).unwrap();
    assert_eq!(s.rows[0].count, 192);
    assert_eq!(s.rows[1].count, 4776);
    let c = predicted_constant(Prediction::Torus { area: 1.0 }).unwrap();
    assert!((s.rows[1].count_over_t2 / c - 1.0).abs() < 0.03);
    let once = count_series(&t, CountKind::Cylinders, &[10.0], Signs::Once).unwrap();
    assert_eq!(once.rows[0].count, 96);
}

#[test]
fn telescoping_is_exact() {
    let x5 = build(Family::Xn, 5).unwrap();
    let c = cylinders_up_to(&x5, 30.0).unwrap();
    for levels in 0..8 {
        assert_eq!(telescoped_count(&c, 30.0, levels), c.count(30.0));
    }
}

#[test]
fn quadratic_bracket() {
    for (fam, p) in [
        (Family::Xn, Prediction::Xn { n: 5 }),
        (Family::Xn, Prediction::Xn { n: 7 }),
        (Family::Sn, Prediction::Sn { n: 5 }),
    ] {
        let n = match p {
            Prediction::Xn { n } | Prediction::Sn { n } => n,
            _ => unreachable!(),
        };
        let s = build(fam, n).unwrap();
        let c = predicted_constant(p).unwrap();
        let series = count_series(&s, CountKind::Cylinders, &[10.0, 15.0, 20.0, 30.0], p.signs()).unwrap();
        for r in &series.rows {
            assert!(
                r.count_over_t2 > c / 2.0 && r.count_over_t2 < 2.0 * c,
                "{} {:?}",
                s.name(),
                r
            );
        }
    }
}

#[test]
fn counts_are_monotone_and_deterministic() {
    let s5 = build(Family::Sn, 5).unwrap();
    let a = count_series(&s5, CountKind::SaddleConnections, &[2.0, 4.0, 8.0], Signs::Both).unwrap();
    let b = count_series(&s5, CountKind::SaddleConnections, &[2.0, 4.0, 8.0], Signs::Both).unwrap();
    assert_eq!(a, b);
    assert!(a.rows.windows(2).all(|w| w[0].count <= w[1].count));
    let x = saddle_connections(&s5, 8.0).unwrap();
    let y = saddle_connections(&s5, 8.0).unwrap();
    assert_eq!(x, y);
}

#[test]
fn short_cylinders_are_isolated() {
    // vertical cylinders of a_t X_5 shrink, one per class
    let x5 = build(Family::Xn, 5).unwrap();
    let g = sl2_element(Sl2Kind::DiagT, 3.0).unwrap();
    let y = delaunay(&x5.apply_matrix(&g).unwrap()).unwrap();
    let hw = heights_widths(5);
    let short = [hw[0].0 * (-3.0f64).exp(), hw[1].0 * (-3.0f64).exp()];
    for (j, (h, w)) in hw.iter().enumerate() {
        let area = h * w;
        assert_eq!(
            short_cylinders_in_class(&y, short[j] * 1.01, area, 1e-6).unwrap(),
            1
        );
        assert_eq!(
            short_cylinders_in_class(&y, short[j] * 0.99, area, 1e-6).unwrap(),
            0
        );
    }
}

#[test]
fn degenerate_cover_direction() {
    // the branch points of r^-1 u S_5 sit on vertical saddle connections, so
    // the doubled cylinders have no width
    let g = gamma_n(5).unwrap();
    let (u, r) = (g.generators[0], g.generators[1]);
    let y = build(Family::Sn, 5)
        .unwrap()
        .apply_matrix(&(r.inverse() * u))
        .unwrap();
    let d = decompose(&y, Vec2::new(0.0, 1.0), 100.0).unwrap();
    let mut l: Vec<f64> = d.cylinders.iter().map(|c| c.circumference).collect();
    l.sort_by(f64::total_cmp);
    let hw = heights_widths(5);
    let want = [hw[0].0, hw[0].0, hw[1].0, hw[1].0];
    assert_eq!(l.len(), 4);
    for (a, b) in l.iter().zip(want) {
        assert_relative_eq!(*a, b, max_relative = 1e-9);
    }
    assert_relative_eq!(d.total_area(), y.area(), max_relative = 1e-9);
}

#[test]
fn skipped_directions_hold_no_short_cylinders() {
    let s5 = build(Family::Sn, 5).unwrap();
    let l = 10.0;
    let c = cylinders_up_to(&s5, l).unwrap();
    assert!(!c.skipped.is_empty());
    for sk in &c.skipped {
        if let Ok(d) = decompose(&s5, sk.direction, 40.0 * l) {
            assert!(d.cylinders.iter().all(|c| c.circumference > l));
        }
    }
    let wide = cylinders_up_to_with(&s5, l, CylinderOptions { budget_factor: 40.0 }).unwrap();
    assert_eq!(wide.cylinders.len(), c.cylinders.len());
}

#[test]
fn areas_of_a_census_are_known() {
    let x5 = build(Family::Xn, 5).unwrap();
    let c = cylinders_up_to(&x5, 20.0).unwrap();
    let hw = heights_widths(5);
    for cyl in &c.cylinders {
        assert!(hw.iter().any(|(h, w)| (cyl.area - h * w).abs() < 1e-6));
        assert_relative_eq!(cyl.circumference * cyl.width, cyl.area, max_relative = 1e-9);
    }
}

#[test]
fn cover_patterns_for_larger_n() {
    use flatsurf_core::asymptotics::cover_pattern;
    use flatsurf_core::Mat2;
    for n in [5u32, 7] {
        let g = gamma_n(n).unwrap();
        let u = g.generators[0];
        let p = cover_pattern(n, &u, 1e-6).unwrap();
        assert_eq!(p.lengths.len(), n as usize + 1, "{p:?}");
        assert!(p.k.is_some(), "{p:?}");
        let id = cover_pattern(n, &Mat2::IDENTITY, 1e-6).unwrap();
        assert!(id.k.is_some(), "{id:?}");
    }
}

#[test]
fn ellipse_integral_scale() {
    use flatsurf_core::asymptotics::ellipse_bracket;
    let t: f64 = 3.0;
    let vs: Vec<Vec2> = (0..64)
        .map(|i| {
            let r = t.exp() * (0.55 + 0.45 * (i % 8) as f64 / 7.0);
            Vec2::from_angle(0.1 + i as f64 * 0.37) * r
        })
        .collect();
    let (lo, hi) = ellipse_bracket(&vs, t, 200_000).unwrap();
    assert!(lo > 0.0 && hi < 10.0, "{lo} {hi}");
    // the lower edge of the annulus only touches the trapezoid at a corner
    let (edge, _) = ellipse_bracket(&[Vec2::new(0.0, t.exp() / 2.0)], t, 200_000).unwrap();
    assert_eq!(edge, 0.0);
}

#[test]
fn gamma5_orbit_of_short_cylinder() {
    use flatsurf_core::veech::{find_parabolic, orbit_count, sl2z_calibration};
    let (h1, w1) = heights_widths(5)[0];
    let v = Vec2::new(0.0, h1);
    let g = gamma_n(5).unwrap();
    let p = find_parabolic(&g, v, 6).unwrap();
    let t = 25.0;
    let c = orbit_count(&g, v, t, 4.0, Some(&p)).unwrap();
    let per_orbit = 5.0 / (3.0 * std::f64::consts::PI) / (h1 * w1);
    assert_relative_eq!(per_orbit, 0.403641, max_relative = 1e-5);

    let cal = sl2z_calibration(t, 4.0).unwrap().ratio().unwrap();
    let raw = c.predicted.unwrap() / (t * t);
    let measured = c.count as f64 / (t * t);
    // the lemma's constant is the per-orbit constant; the lattice factor maps it to orbit points
    assert!((raw / per_orbit - 1.0).abs() < 0.01, "raw {raw} vs {per_orbit}");
    assert!(
        (measured / (cal * per_orbit) - 1.0).abs() < 0.25,
        "{measured} vs {}",
        cal * per_orbit
    );
    assert!((measured / (2.0 * per_orbit) - 1.0).abs() < 0.25);
}
