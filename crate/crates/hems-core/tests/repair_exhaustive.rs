//! Exhaustive check of the row repair operator against subset enumeration.
//!
//! For every bit vector of length <= 12 and every required ON-count, the
//! repaired row must reach the count with the minimum number of flips and,
//! among all minimum-flip solutions, the cheapest total price.

use hems_core::repair_row;

fn price_pattern(len: usize) -> Vec<f64> {
    // Cycles through the three tariff rates so every length has price ties
    // at separated indices, exercising the index tie-break.
    const RATES: [f64; 5] = [6.5, 13.2, 9.4, 6.5, 9.4];
    (0..len).map(|i| RATES[i % RATES.len()]).collect()
}

fn orders(prices: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut cheap: Vec<usize> = (0..prices.len()).collect();
    cheap.sort_by(|&a, &b| prices[a].total_cmp(&prices[b]).then(a.cmp(&b)));
    let mut expensive: Vec<usize> = (0..prices.len()).collect();
    expensive.sort_by(|&a, &b| prices[b].total_cmp(&prices[a]).then(a.cmp(&b)));
    (cheap, expensive)
}

fn mask_cost(mask: u32, prices: &[f64]) -> f64 {
    prices
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn repair_reaches_the_cheapest_minimum_flip_solution() {
    for len in 1..=12usize {
        let prices = price_pattern(len);
        let (cheap, expensive) = orders(&prices);
        let all_masks = 1u32 << len;

        // Candidate masks bucketed by ON-count, with costs precomputed.
        let mut by_count: Vec<Vec<(u32, f64)>> = vec![Vec::new(); len + 1];
        for mask in 0..all_masks {
            by_count[mask.count_ones() as usize].push((mask, mask_cost(mask, &prices)));
        }

        for input in 0..all_masks {
            let input_count = input.count_ones() as usize;
            for (required, bucket) in by_count.iter().enumerate() {
                let mut row: Vec<bool> = (0..len).map(|i| input >> i & 1 == 1).collect();
                repair_row(&mut row, required, &cheap, &expensive);

                let repaired: u32 = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| 1u32 << i)
                    .sum();
                let flips = (repaired ^ input).count_ones() as usize;
                let min_flips = input_count.abs_diff(required);
                assert_eq!(repaired.count_ones() as usize, required);
                assert_eq!(flips, min_flips, "len {len} input {input:b} req {required}");
                if input_count == required {
                    assert_eq!(repaired, input, "satisfied input must pass unchanged");
                }

                let best = bucket
                    .iter()
                    .filter(|(mask, _)| (mask ^ input).count_ones() as usize == min_flips)
                    .map(|(_, cost)| *cost)
                    .fold(f64::INFINITY, f64::min);
                let got = mask_cost(repaired, &prices);
                assert!(
                    (got - best).abs() < 1e-9,
                    "len {len} input {input:b} req {required}: cost {got} vs optimal {best}"
                );
            }
        }
    }
}
