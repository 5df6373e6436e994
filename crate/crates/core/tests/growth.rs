use dirperc_core::growth::*;
use dirperc_core::passage::{first_passage, last_passage};
use dirperc_core::rng::derive_seed;
use dirperc_core::{DistributionSpec, LatticeBox, Mode, WeightField};

fn spec(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

#[test]
fn snapshots_are_nested_down_sets() {
    let b = LatticeBox::new(&[120, 90]).unwrap();
    for (k, law) in ["exp:1", "geo:0.5", "pareto:1/3,1.5"].iter().enumerate() {
        let field = WeightField::sample(&b, &spec(law), k as u64);
        let snaps = growth_snapshots(&field, &[5.0, 20.0, 40.0, 80.0], Mode::Last).unwrap();
        for w in snaps.windows(2) {
            assert!(w[0].is_subset_of(&w[1]), "{law}");
        }
        assert!(snaps.iter().all(|s| s.is_down_set()), "{law}");
        let c = growth_snapshots(&field, &[5.0, 20.0, 40.0], Mode::First).unwrap();
        assert!(c[0].is_subset_of(&c[1]) && c[1].is_subset_of(&c[2]));
    }
}

#[test]
fn first_mode_sets_are_negated_last_mode_sets() {
    let b = LatticeBox::new(&[60, 60]).unwrap();
    let field = WeightField::sample(&b, &spec("unif:-1,2"), 9);
    let s = first_passage(&field);
    let t_neg = last_passage(&field.negated());
    for t in [-3.0, 0.0, 5.0, 20.0] {
        let occ: Vec<bool> = s.values().iter().map(|&v| v <= t).collect();
        let dual: Vec<bool> = t_neg.values().iter().map(|&v| -v <= t).collect();
        assert_eq!(occ, dual);
    }
}

#[test]
fn layer_counts_in_the_raster() {
    let b = LatticeBox::new(&[200, 200]).unwrap();
    let field = WeightField::sample(&b, &spec("exp:1"), 2);
    let ts = [15.0, 30.0, 45.0, 60.0];
    let snaps = growth_snapshots(&field, &ts, Mode::Last).unwrap();
    let img = render_pgm(&snaps).unwrap();
    let body = &img[img.len() - 200 * 200..];
    let mut prev = 0;
    for (j, s) in snaps.iter().enumerate() {
        let layer = body.iter().filter(|&&g| g == layer_gray(j, 4)).count();
        assert_eq!(layer, s.count() - prev);
        prev = s.count();
    }
    assert_eq!(body.iter().filter(|&&g| g == 255).count(), 200 * 200 - prev);
}

#[test]
fn exponential_shape_converges_in_t() {
    let b = LatticeBox::new(&[700, 700]).unwrap();
    let field = WeightField::sample(&b, &spec("exp:1"), 2);
    let snaps = growth_snapshots(&field, &[75.0, 150.0, 300.0], Mode::Last).unwrap();
    let metrics: Vec<f64> = snaps
        .iter()
        .map(|s| shape_distance(s, &SqrtSimplex).unwrap().metric)
        .collect();
    for w in metrics.windows(2) {
        assert!(w[1] <= 1.2 * w[0], "{metrics:?}");
    }
}

#[test]
fn three_dimensional_growth_renders() {
    let b = LatticeBox::new(&[40, 40, 40]).unwrap();
    let field = WeightField::sample(&b, &spec("exp:1"), 7);
    let snap = growth_snapshots(&field, &[30.0], Mode::Last).unwrap().remove(0);
    assert!(snap.is_down_set());
    assert!(!snap.truncated);
    let map = render_height_map(&snap).unwrap();
    assert!(map.starts_with(b"P5\n"));
    let slice = snap.axis_slice(&[0]).unwrap();
    assert!(slice.count() > 0);
    assert!(render_pgm(&[slice]).is_ok());
}

#[test]
fn zero_weight_percolation_escapes() {
    // 0 w.p. 0.645, 1/0.355 otherwise: zero-weight sites percolate
    let s = spec("two:0,0.645,1/0.355");
    let b = LatticeBox::new(&[350, 350]).unwrap();
    let escaped = (0..20u64)
        .filter(|&k| {
            first_passage_escape(&WeightField::sample(&b, &s, derive_seed(4, k)), 54.0)
                .unwrap()
                .escaped
        })
        .count();
    assert!(escaped > 10, "{escaped}/20");
    let ones = WeightField::from_fn(&b, |_| 1.0).unwrap();
    assert!(!first_passage_escape(&ones, 348.0).unwrap().escaped);
}
