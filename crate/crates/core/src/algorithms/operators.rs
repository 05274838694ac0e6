//! Variation operators on bit strings.

use bitvec::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::AlgorithmError;
use crate::objectives::Bits;

/// Uniformly random bit string; draws one `bool` per position in order.
pub fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Bits {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// Positions to flip under standard bit mutation: each of the `n` positions
/// independently with probability `1/n`, sampled by geometric skips.
/// `out` is cleared and filled in ascending order.
pub fn flip_positions<R: Rng + ?Sized>(n: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    if n == 0 {
        return;
    }
    let skips = Geometric::new(1.0 / n as f64).expect("1/n is a probability");
    let mut pos: u64 = 0;
    loop {
        pos = pos.saturating_add(skips.sample(rng));
        if pos >= n as u64 {
            break;
        }
        out.push(pos as usize);
        pos += 1;
    }
}

/// Offspring of `bits` under standard bit mutation; `bits` is untouched.
pub fn bitflip_mutation<R: Rng + ?Sized>(bits: &BitSlice<u64, Lsb0>, rng: &mut R) -> Bits {
    let mut positions = Vec::new();
    flip_positions(bits.len(), rng, &mut positions);
    let mut child = bits.to_bitvec();
    for p in positions {
        let old = child[p];
        child.set(p, !old);
    }
    child
}

/// Children `a[..cut] + b[cut..]` and `b[..cut] + a[cut..]`.
pub fn crossover_at(
    a: &BitSlice<u64, Lsb0>,
    b: &BitSlice<u64, Lsb0>,
    cut: usize,
) -> Result<(Bits, Bits), AlgorithmError> {
    if a.len() != b.len() {
        return Err(AlgorithmError::LengthMismatch(a.len(), b.len()));
    }
    let mut first = a.to_bitvec();
    let mut second = b.to_bitvec();
    first[cut..].copy_from_bitslice(&b[cut..]);
    second[cut..].copy_from_bitslice(&a[cut..]);
    Ok((first, second))
}

/// Single-point crossover with the cut drawn uniformly from `1..n`.
pub fn single_point_crossover<R: Rng + ?Sized>(
    a: &BitSlice<u64, Lsb0>,
    b: &BitSlice<u64, Lsb0>,
    rng: &mut R,
) -> Result<(Bits, Bits), AlgorithmError> {
    if a.len() != b.len() {
        return Err(AlgorithmError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(AlgorithmError::TooShort(a.len()));
    }
    let cut = rng.random_range(1..a.len());
    crossover_at(a, b, cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn bits(s: &str) -> Bits {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn single_bit_always_flips() {
        let mut rng = seeded_rng(1);
        let parent = bits("0");
        for _ in 0..100 {
            assert_eq!(bitflip_mutation(&parent, &mut rng), bits("1"));
        }
        assert_eq!(parent, bits("0"));
    }

    #[test]
    fn mean_hamming_distance_is_one() {
        for n in [2usize, 10, 100, 500] {
            let mut rng = seeded_rng(n as u64);
            let parent = bits(&"01".repeat(n / 2));
            let draws = 100_000;
            let total: usize = (0..draws)
                .map(|_| {
                    let child = bitflip_mutation(&parent, &mut rng);
                    (child ^ parent.clone()).count_ones()
                })
                .sum();
            let mean = total as f64 / draws as f64;
            assert!((mean - 1.0).abs() <= 0.05, "n={n}: mean {mean}");
        }
    }

    #[test]
    fn per_position_rate_is_uniform() {
        let n = 8;
        let mut rng = seeded_rng(9);
        let mut hits = vec![0usize; n];
        let mut out = Vec::new();
        let draws = 80_000;
        for _ in 0..draws {
            flip_positions(n, &mut rng, &mut out);
            assert!(out.windows(2).all(|w| w[0] < w[1]));
            for &p in &out {
                hits[p] += 1;
            }
        }
        for h in hits {
            let rate = h as f64 / draws as f64;
            assert!((rate - 0.125).abs() < 0.01, "rate {rate}");
        }
    }

    #[test]
    fn mutation_is_seed_deterministic() {
        let parent = bits("0110100111010010");
        let a: Vec<Bits> = {
            let mut rng = seeded_rng(5);
            (0..20).map(|_| bitflip_mutation(&parent, &mut rng)).collect()
        };
        let b: Vec<Bits> = {
            let mut rng = seeded_rng(5);
            (0..20).map(|_| bitflip_mutation(&parent, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn crossover_examples() {
        let (c, d) = crossover_at(&bits("0000"), &bits("1111"), 2).unwrap();
        assert_eq!((c, d), (bits("0011"), bits("1100")));
        let a = bits("10110");
        let mut rng = seeded_rng(3);
        let (c, d) = single_point_crossover(&a, &a, &mut rng).unwrap();
        assert_eq!((&c, &d), (&a, &a));
    }

    #[test]
    fn crossover_preserves_columns() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let a = random_bits(37, &mut rng);
            let b = random_bits(37, &mut rng);
            let (c, d) = single_point_crossover(&a, &b, &mut rng).unwrap();
            for i in 0..37 {
                assert_eq!(a[i] as u8 + b[i] as u8, c[i] as u8 + d[i] as u8);
            }
            assert!(c[0] == a[0] && d[0] == b[0]);
            assert!(c[36] == b[36] && d[36] == a[36]);
        }
    }

    #[test]
    fn crossover_errors() {
        let mut rng = seeded_rng(0);
        assert_eq!(
            single_point_crossover(&bits("01"), &bits("011"), &mut rng).unwrap_err(),
            AlgorithmError::LengthMismatch(2, 3)
        );
        assert_eq!(
            single_point_crossover(&bits("0"), &bits("1"), &mut rng).unwrap_err(),
            AlgorithmError::TooShort(1)
        );
    }
}
