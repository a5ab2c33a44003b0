use proptest::prelude::*;

use byzagg::aggregation::{
    coordinate_trim, geometric_median, krum, krum_scores, medoid, median_objective, min_diameter_subset, multi_krum,
    subset_diameter, KrumDistance, WeiszfeldConfig,
};
use byzagg::subsets::Combinations;
use byzagg::{box_intersection, euclidean_distance, Hyperbox, Interval, SystemParams, Vector};

fn points(m: std::ops::RangeInclusive<usize>, d: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), m)
        .prop_map(|vs| vs.into_iter().map(|c| Vector::new(c).unwrap()).collect())
}

fn boxes(d: usize) -> impl Strategy<Value = Hyperbox> {
    prop::collection::vec((-5.0f64..5.0, 0.0f64..4.0), d).prop_map(|iv| {
        Hyperbox::new(iv.into_iter().map(|(lo, w)| Interval::new(lo, lo + w).unwrap()).collect()).unwrap()
    })
}

fn mean_of(vs: &[Vector]) -> Vec<f64> {
    let d = vs[0].dim();
    (0..d).map(|i| vs.iter().map(|v| v[i]).sum::<f64>() / vs.len() as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_laws(a in boxes(3), b in boxes(3), c in boxes(3), p in prop::collection::vec(-6.0f64..6.0, 3)) {
        let ab = box_intersection(&a, &b).unwrap();
        prop_assert_eq!(&ab, &box_intersection(&b, &a).unwrap());
        prop_assert_eq!(box_intersection(&a, &a).unwrap(), Some(a.clone()));
        let left = ab.as_ref().map(|x| box_intersection(x, &c).unwrap()).unwrap_or(None);
        let bc = box_intersection(&b, &c).unwrap();
        let right = bc.as_ref().map(|x| box_intersection(&a, x).unwrap()).unwrap_or(None);
        prop_assert_eq!(left, right);

        let v = Vector::new(p).unwrap();
        let both = a.contains(&v) && b.contains(&v);
        prop_assert_eq!(both, ab.is_some_and(|x| x.contains(&v)));
    }

    #[test]
    fn median_beats_every_grid_point(vs in points(3..=9, 2)) {
        let cfg = WeiszfeldConfig::default();
        let mu = geometric_median(&vs, &cfg).unwrap();
        let obj = median_objective(&vs, &mu);
        let b = Hyperbox::bounding(&vs).unwrap();
        let (x, y) = (b.intervals()[0], b.intervals()[1]);
        let steps = 120;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let g = Vector::new(vec![
                    x.lo + (x.hi - x.lo) * i as f64 / steps as f64,
                    y.lo + (y.hi - y.lo) * j as f64 / steps as f64,
                ]).unwrap();
                best = best.min(median_objective(&vs, &g));
            }
        }
        for v in &vs {
            best = best.min(median_objective(&vs, v));
        }
        prop_assert!(obj <= best + vs.len() as f64 * cfg.tol, "objective {} vs grid {}", obj, best);
    }

    #[test]
    fn reflected_set_keeps_its_centre(half in points(2..=5, 3), c in prop::collection::vec(-3.0f64..3.0, 3)) {
        let mu = Vector::new(c).unwrap();
        let mut vs = half.clone();
        vs.extend(half.iter().map(|s| mu.scale(2.0).sub(s)));
        let m = geometric_median(&vs, &WeiszfeldConfig::default()).unwrap();
        prop_assert!(euclidean_distance(&m, &mu).unwrap() < 1e-6, "{:?} vs {:?}", m, mu);
    }

    #[test]
    fn selection_rules_pick_inputs(vs in points(7..=12, 3)) {
        let p = SystemParams::new(vs.len(), 2, 0, 3).unwrap();
        let k = krum(&vs, &p).unwrap();
        prop_assert!(vs.contains(&k));
        let m = medoid(&vs).unwrap();
        prop_assert!(vs.contains(&m));

        let q = 3;
        let scores = krum_scores(&vs, &p, KrumDistance::default()).unwrap();
        let mut order: Vec<usize> = (0..vs.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        let chosen: Vec<Vector> = order[..q].iter().map(|&i| vs[i].clone()).collect();
        let mk = multi_krum(&vs, &p, q).unwrap();
        for (a, b) in mk.iter().zip(mean_of(&chosen)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn trim_box_inside_bounding_box(vs in points(7..=12, 4), t in 1usize..=2) {
        let p = SystemParams::new(vs.len(), t, 0, 4).unwrap();
        let th = coordinate_trim(&vs, &p).unwrap();
        prop_assert!(Hyperbox::bounding(&vs).unwrap().contains_box(&th, 0.0));
    }

    #[test]
    fn min_diameter_is_minimal(vs in points(5..=9, 2), t in 1usize..=2) {
        let size = vs.len() - t;
        let best = min_diameter_subset(&vs, size).unwrap();
        let dia = subset_diameter(&vs, &best);
        for idx in Combinations::new(vs.len(), size) {
            prop_assert!(dia <= subset_diameter(&vs, &idx));
        }
    }
}
