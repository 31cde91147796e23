use enclose_core::enclosure::{enclosed_subset, ObstacleKind, ObstacleSet};
use enclose_core::exact::{encloses_all, exact_solve};
use enclose_core::gen::{generate, GenParams, Structure};
use enclose_core::io::{parse_instance, write_instance, Method};
use enclose_core::solution::{check, solve, SolveOptions};
use enclose_core::Instance;
use itertools::Itertools;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ObstacleKind> {
    prop_oneof![Just(ObstacleKind::UnitDisks), Just(ObstacleKind::Segments)]
}

fn structure() -> impl Strategy<Value = Structure> {
    prop_oneof![Just(Structure::Random), Just(Structure::Ring), Just(Structure::Nested)]
}

fn instance(max_obstacles: usize) -> impl Strategy<Value = Instance> {
    (kind(), structure(), 0..=max_obstacles, 0usize..4, any::<u64>()).prop_map(|(kind, structure, obstacles, points, seed)| {
        generate(&GenParams { kind, obstacles, points, seed, structure }).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn files_round_trip(inst in instance(12)) {
        let text = write_instance(&inst);
        let back: Instance = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn solutions_check_out(inst in instance(9)) {
        let feasible = enclosed_subset(&inst.points, &inst.obstacles).unwrap().len() == inst.points.len();
        let method = match inst.kind() {
            ObstacleKind::UnitDisks => Method::Mincut,
            ObstacleKind::Segments => Method::Lp,
        };
        for m in [method, Method::Exact] {
            match solve(&inst, m, &SolveOptions::default()) {
                Ok(sol) => {
                    prop_assert!(feasible);
                    prop_assert!(check(&inst, &sol).unwrap().into_iter().all(|ok| ok));
                }
                Err(e) => prop_assert!(!feasible, "{m} failed on a feasible instance: {e}"),
            }
        }
    }

    #[test]
    fn exact_is_minimal_and_monotone(inst in instance(8), drop in any::<prop::sample::Index>()) {
        let Some((k, witness)) = exact_solve(&inst.points, &inst.obstacles, usize::MAX).unwrap().optimum else {
            return Ok(());
        };
        prop_assert!(encloses_all(&inst.points, &inst.obstacles.subset(&witness)).unwrap());
        if (1..=4).contains(&k) {
            for smaller in (0..inst.obstacles.len()).combinations(k - 1) {
                prop_assert!(!encloses_all(&inst.points, &inst.obstacles.subset(&smaller)).unwrap());
            }
        }
        if !inst.obstacles.is_empty() {
            let gone = drop.index(inst.obstacles.len());
            let rest: Vec<usize> = (0..inst.obstacles.len()).filter(|&i| i != gone).collect();
            let reduced: ObstacleSet<_> = inst.obstacles.subset(&rest);
            if let Some((k2, _)) = exact_solve(&inst.points, &reduced, usize::MAX).unwrap().optimum {
                prop_assert!(k2 >= k);
            }
        }
    }
}
