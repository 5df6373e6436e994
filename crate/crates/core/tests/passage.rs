use dirperc_core::passage::*;
use dirperc_core::rng::derive_seed;
use dirperc_core::{DistributionSpec, LatticeBox, Mode, WeightField};
use proptest::prelude::*;

fn spec(s: &str) -> DistributionSpec {
    s.parse().unwrap()
}

/// Every directed path to `z` as a list of visited points (final point excluded).
fn all_paths(z: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(cur: &mut Vec<usize>, z: &[usize], path: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if cur.as_slice() == z {
            out.push(path.clone());
            return;
        }
        for i in 0..z.len() {
            if cur[i] < z[i] {
                path.push(cur.clone());
                cur[i] += 1;
                go(cur, z, path, out);
                cur[i] -= 1;
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut vec![0; z.len()], z, &mut Vec::new(), &mut out);
    out
}

#[test]
fn path_counts_are_multinomial() {
    for z in [vec![2, 3], vec![1, 1, 1], vec![3, 0, 2], vec![0, 0]] {
        assert_eq!(all_paths(&z).len() as f64, path_count(&z), "{z:?}");
    }
    assert_eq!(path_count(&[3, 3]), 20.0);
}

#[test]
fn dp_matches_an_independent_path_list() {
    let laws = ["exp:1", "unif:-1,2", "geo:0.4", "pareto:1,0.75"];
    for (k, law) in laws.iter().enumerate() {
        let b = LatticeBox::new(&[4, 3, 3]).unwrap();
        let field = WeightField::sample(&b, &spec(law), k as u64);
        let last = last_passage(&field);
        let first = first_passage(&field);
        let mut z = vec![0usize; 3];
        loop {
            let sums: Vec<f64> = all_paths(&z)
                .iter()
                .map(|p| p.iter().fold(0.0, |acc, q| acc + field.get(q)))
                .collect();
            let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let (hi, lo) = if sums.is_empty() { (0.0, 0.0) } else { (hi, lo) };
            assert_eq!(last.get(&z), hi, "{law} {z:?}");
            assert_eq!(first.get(&z), lo, "{law} {z:?}");
            if !b.advance(&mut z) {
                break;
            }
        }
    }
}

#[test]
fn nested_boxes_agree_on_their_intersection() {
    let s = spec("exp:1");
    let small = WeightField::sample(&LatticeBox::new(&[5, 7]).unwrap(), &s, 42);
    let big = WeightField::sample(&LatticeBox::new(&[9, 8]).unwrap(), &s, 42);
    let ts = last_passage(&small);
    let tb = last_passage(&big);
    for x in 0..5 {
        for y in 0..7 {
            assert_eq!(small.get(&[x, y]), big.get(&[x, y]));
            assert_eq!(ts.get(&[x, y]), tb.get(&[x, y]));
        }
    }
    let s3 = WeightField::sample(&LatticeBox::new(&[2, 3, 2]).unwrap(), &s, 1);
    let b3 = WeightField::sample(&LatticeBox::new(&[3, 3, 4]).unwrap(), &s, 1);
    assert_eq!(s3.get(&[1, 2, 1]), b3.get(&[1, 2, 1]));
}

#[test]
fn streaming_matches_the_stored_field() {
    let s = spec("unif:0,1");
    for (a, b) in [(40, 7), (7, 40), (25, 25), (0, 9), (9, 0)] {
        let field = WeightField::sample(&LatticeBox::new(&[a + 1, b + 1]).unwrap(), &s, 5);
        for mode in [Mode::Last, Mode::First] {
            let full = passage_field(&field, mode).get(&[a, b]);
            assert_eq!(sampled_passage_2d(&s, 5, a, b, mode), full, "{a}x{b} {mode}");
        }
    }
}

#[test]
fn superadditivity_is_exact_for_integer_weights() {
    // integer sums are exact, so concatenating optimal paths is a lower bound
    let s = spec("geo:0.3");
    let b = LatticeBox::new(&[13, 13]).unwrap();
    let mut checked = 0;
    for k in 0..100u64 {
        let field = WeightField::sample(&b, &s, derive_seed(9, k));
        for i in 0..10u64 {
            let h = derive_seed(k, i);
            let x = [(h % 7) as usize, ((h >> 8) % 7) as usize];
            let y = [((h >> 16) % 6) as usize, ((h >> 24) % 6) as usize];
            let xy = [x[0] + y[0], x[1] + y[1]];
            let t_x = passage_between(&field, &[0, 0], &x, Mode::Last).unwrap();
            let t_y = passage_between(&field, &x, &xy, Mode::Last).unwrap();
            let t_xy = passage_between(&field, &[0, 0], &xy, Mode::Last).unwrap();
            assert!(t_x + t_y <= t_xy);
            let s_x = passage_between(&field, &[0, 0], &x, Mode::First).unwrap();
            let s_y = passage_between(&field, &x, &xy, Mode::First).unwrap();
            let s_xy = passage_between(&field, &[0, 0], &xy, Mode::First).unwrap();
            assert!(s_x + s_y >= s_xy);
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn negation_swaps_last_and_first() {
    let b = LatticeBox::new(&[12, 9, 3]).unwrap();
    let field = WeightField::sample(&b, &spec("exp:1"), 3);
    let s = first_passage(&field);
    let t_neg = last_passage(&field.negated());
    for (a, c) in s.values().iter().zip(t_neg.values()) {
        assert_eq!(*a, -*c);
    }
}

#[test]
fn shear_embeds_directed_paths_in_monotone_columns() {
    for k in 0..50u64 {
        let field = WeightField::sample(&LatticeBox::new(&[30, 12]).unwrap(), &spec("ber:0.5"), k);
        for (m, n) in [(18, 11), (5, 3), (0, 4), (29, 0)] {
            let check = verify_psi_domination(&field, m, n).unwrap();
            assert!(check.holds(), "seed {k} ({m},{n}): {check:?}");
        }
    }
}

#[test]
fn monotone_column_model_on_all_ones() {
    let field = WeightField::from_fn(&LatticeBox::new(&[6, 4]).unwrap(), |_| 1.0).unwrap();
    assert_eq!(seppalainen_passage(&field, 6, 3).unwrap(), 6.0);
    let diag = WeightField::from_fn(
        &LatticeBox::new(&[4, 4]).unwrap(),
        |z| if z[0] == z[1] { 1.0 } else { 0.0 },
    )
    .unwrap();
    // heights 0, 1, 2, 3 hit the diagonal in every column
    assert_eq!(seppalainen_passage(&diag, 4, 3).unwrap(), 4.0);
    assert_eq!(seppalainen_passage(&diag, 4, 1).unwrap(), 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_equals_brute_force(values in proptest::collection::vec(-5.0f64..5.0, 16), mode_last in any::<bool>()) {
        let b = LatticeBox::new(&[4, 4]).unwrap();
        let field = WeightField::from_values(&b, values).unwrap();
        let mode = if mode_last { Mode::Last } else { Mode::First };
        let p = passage_field(&field, mode);
        for x in 0..4 {
            for y in 0..4 {
                prop_assert_eq!(p.get(&[x, y]), brute_force_passage(&field, &[x, y], mode).unwrap());
            }
        }
    }

    #[test]
    fn last_dominates_first(seed in any::<u64>()) {
        let b = LatticeBox::new(&[6, 5]).unwrap();
        let field = WeightField::sample(&b, &spec("two:-1,0.5,2"), seed);
        let t = last_passage(&field);
        let s = first_passage(&field);
        for (a, c) in t.values().iter().zip(s.values()) {
            prop_assert!(a >= c);
        }
    }
}
