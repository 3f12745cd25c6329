//! Property suite over fuzzed allocations and move sequences.

use proptest::prelude::*;
use qmap_core::model::{generate_scenario, generate_scenario_with_witness, Compiled};
use qmap_core::solver::{
    allocation_from_witness, generate_move, initial_allocation, random_kind, validate_allocation,
    Score, ScoreBoard, ScoreWeights, SlotAssignment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_scenario(seed: u64) -> Compiled {
    // Cycle through a few shapes so structure coverage isn't seed-shaped.
    let shapes = [
        (1, 2.0, 2, 2),
        (2, 3.0, 2, 2),
        (3, 3.0, 3, 2),
        (5, 4.0, 2, 3),
    ];
    let (requests, hw, depth, branching) = shapes[(seed % 4) as usize];
    let s = generate_scenario(requests, hw, depth, branching, seed).unwrap();
    Compiled::new(&s).unwrap()
}

/// Arbitrary slot mutations (not just solver moves), so invalid structures
/// are well covered.
fn random_batch<R: Rng>(c: &Compiled, rng: &mut R) -> Vec<(usize, SlotAssignment)> {
    let n = c.tasks.len();
    let count = rng.gen_range(1..=3.min(n));
    let mut slots: Vec<usize> = (0..n).collect();
    let mut batch = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = rng.gen_range(0..slots.len());
        let slot = slots.swap_remove(pick);
        let impls = &c.impls_of_type[c.tasks[slot].type_idx];
        batch.push((
            slot,
            SlotAssignment {
                active: rng.gen_bool(0.5),
                impl_idx: impls[rng.gen_range(0..impls.len())] as u32,
                hw_idx: rng.gen_range(0..c.hw.len()) as u32,
            },
        ));
    }
    batch
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// hard == 0 exactly when the straight-line validator accepts, across
    /// arbitrary (including structurally broken) allocations.
    #[test]
    fn zero_hard_score_iff_validator_accepts(seed in 0u64..5000, steps in 1usize..30) {
        let c = small_scenario(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let mut alloc = initial_allocation(&c, &mut rng);
        let weights = ScoreWeights { sub_factor: 1, sw_factor: 5 };
        let mut board = ScoreBoard::new(&c, &alloc, weights);
        for _ in 0..steps {
            let batch = random_batch(&c, &mut rng);
            board.apply(&c, &mut alloc, &batch);
            prop_assert_eq!(validate_allocation(&c, &alloc), board.score().hard == 0);
        }
    }

    /// Incremental maintenance equals a from-scratch rebuild after every
    /// batch, for solver moves and for arbitrary mutations.
    #[test]
    fn incremental_score_equals_full_rescore(seed in 0u64..5000, steps in 1usize..30) {
        let c = small_scenario(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x100000001b3));
        let mut alloc = initial_allocation(&c, &mut rng);
        let weights = ScoreWeights { sub_factor: 2, sw_factor: 3 };
        let mut board = ScoreBoard::new(&c, &alloc, weights);
        for step in 0..steps {
            if step % 2 == 0 {
                let kind = random_kind(&mut rng);
                let mv = generate_move(&c, &alloc, &mut rng, kind);
                board.apply(&c, &mut alloc, &mv.changes);
            } else {
                let batch = random_batch(&c, &mut rng);
                board.apply(&c, &mut alloc, &batch);
            }
            let rebuilt = ScoreBoard::new(&c, &alloc, weights);
            prop_assert_eq!(&board, &rebuilt);
        }
    }

    /// Apply + undo restores the allocation and score state bit-for-bit.
    #[test]
    fn apply_undo_is_identity(seed in 0u64..5000, steps in 1usize..40) {
        let c = small_scenario(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(!seed);
        let mut alloc = initial_allocation(&c, &mut rng);
        let weights = ScoreWeights { sub_factor: 1, sw_factor: 1 };
        let mut board = ScoreBoard::new(&c, &alloc, weights);
        for _ in 0..steps {
            let kind = random_kind(&mut rng);
            let mv = generate_move(&c, &alloc, &mut rng, kind);
            let before_alloc = alloc.clone();
            let before_board = board.clone();
            let undo = board.apply(&c, &mut alloc, &mv.changes);
            board.undo(&c, &mut alloc, undo);
            prop_assert_eq!(&before_alloc, &alloc);
            prop_assert_eq!(&before_board, &board);
        }
    }

    /// Score ordering is the lexicographic total order.
    #[test]
    fn score_ordering_is_lexicographic(h1 in 0i64..100, s1 in 0i64..10_000_000,
                                       h2 in 0i64..100, s2 in 0i64..10_000_000) {
        let a = Score { hard: h1, soft_micro: s1 };
        let b = Score { hard: h2, soft_micro: s2 };
        let expected_better = h1 < h2 || (h1 == h2 && s1 < s2);
        prop_assert_eq!(a < b, expected_better);
    }

    /// Every generated scenario's recorded witness passes the validity check.
    #[test]
    fn generator_witness_is_valid(seed in 0u64..300) {
        let shapes = [(1, 2.0, 2, 2), (4, 6.0, 3, 2), (8, 10.0, 2, 3), (2, 5.0, 4, 2)];
        let (requests, hw, depth, branching) = shapes[(seed % 4) as usize];
        let (s, w) = generate_scenario_with_witness(requests, hw, depth, branching, seed).unwrap();
        let c = Compiled::new(&s).unwrap();
        let alloc = allocation_from_witness(&c, &w).unwrap();
        prop_assert!(validate_allocation(&c, &alloc));
        let board = ScoreBoard::new(&c, &alloc, ScoreWeights { sub_factor: 1, sw_factor: 5 });
        prop_assert_eq!(board.score().hard, 0);
    }
}
