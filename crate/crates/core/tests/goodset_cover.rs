use juliagreen_core::goodset::{
    generate_cover, membership, shift, split_interval, total_length, BitWord, DyadicInterval,
};
use juliagreen_core::{dimension_bound, DirectionAngle};
use rand::{Rng, SeedableRng};

/// A random word whose cyclic repetition has no run longer than `max_run`.
fn random_cyclic_word(rng: &mut impl Rng, len: usize, max_run: usize) -> Vec<u8> {
    loop {
        let bits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        let doubled: Vec<u8> = bits.iter().chain(&bits).copied().collect();
        if BitWord(doubled).max_run() <= max_run {
            return bits;
        }
    }
}

#[test]
fn membership_is_shift_invariant_on_random_periodic_words() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for trial in 0..10_000 {
        let level = 1 + trial % 3;
        let len = rng.gen_range(4..=24);
        let bits = random_cyclic_word(&mut rng, len, level as usize + 1);
        let num = bits.iter().fold(0u64, |acc, b| 2 * acc + u64::from(*b));
        let angle = DirectionAngle::new(num, (1 << len) - 1).unwrap();
        assert!(membership(&angle, level).unwrap());
        let shifted = shift(&angle).unwrap();
        assert!(membership(&shifted, level).unwrap());
        assert!(membership(&angle.mirror(), level).unwrap());
        let strictly = membership(&angle, level - 1).unwrap_or(true);
        let run = BitWord(bits.iter().chain(&bits).copied().collect()).max_run();
        assert_eq!(level > 1 && !strictly, level > 1 && run > level as usize);
    }
}

/// Retention of at least half the parent and shrinkage below `2^{−N}`, exactly.
fn check_split(parent: &DyadicInterval, goodset: u32) -> Vec<DyadicInterval> {
    let kids = split_interval(parent, goodset + 1).unwrap().keep;
    let (num, log2den) = total_length(&kids);
    assert!(num << (parent.len + 1) >= 1u128 << log2den, "{parent:?}");
    for kid in &kids {
        assert!(kid.is_within(parent));
        assert!(kid.len > parent.len + goodset);
    }
    kids
}

#[test]
fn cover_measures_in_exact_arithmetic() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for (goodset, enumerated) in [(2u32, 5u32), (3, 3)] {
        for k in 0..enumerated {
            let level = generate_cover(goodset, k).unwrap();
            let next = generate_cover(goodset, k + 1).unwrap();
            let mut produced = Vec::new();
            for parent in &level.keep {
                produced.extend(check_split(parent, goodset));
            }
            produced.sort();
            assert_eq!(produced, next.keep);
        }
        // Deeper levels are checked along random lineages.
        let deepest = generate_cover(goodset, enumerated).unwrap().keep;
        for _ in 0..200 {
            let mut parent = deepest[rng.gen_range(0..deepest.len())];
            for _ in enumerated..5 {
                let kids = check_split(&parent, goodset);
                parent = kids[rng.gen_range(0..kids.len())];
            }
        }
    }
    let base = generate_cover(1, 1).unwrap();
    let parent = DyadicInterval::unit_half(1);
    let kids: Vec<DyadicInterval> = base.keep.iter().filter(|iv| iv.is_within(&parent)).copied().collect();
    let (num, log2den) = total_length(&kids);
    // Five eighths of [½, 1].
    assert_eq!((num, log2den), (5, 4));
}

#[test]
fn dimension_estimates() {
    let one = dimension_bound(1);
    let two = dimension_bound(2);
    assert!((one.transfer - 0.69424).abs() < 1e-5);
    assert!((two.transfer - 0.87915).abs() < 1e-5);
    for level in 1..=12 {
        let bound = dimension_bound(level);
        assert!((bound.transfer - bound.word_count).abs() < 1e-3);
        assert!(bound.transfer >= 1.0 - 1.0 / f64::from(level));
    }
}
