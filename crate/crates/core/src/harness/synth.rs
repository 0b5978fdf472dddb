//! Synthetic benchmark with planted structure. Datasets come in pairs drawn
//! from the same family, so each has a close relative among the others.
//! Each family favours a different kind of predictor:
//!
//! * `linear`: a noisy hyperplane; linear models and naive Bayes do well.
//! * `threshold`: three classes cut along a single feature; rule learners and trees.
//! * `xor`: a checkerboard on two features; neighbours and tree ensembles.
//! * `counts`: class-dependent Poisson counts with missing entries; naive Bayes.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};

use super::experiment::derive_seed;
use crate::components::Dataset;

pub const FAMILIES: [&str; 4] = ["linear", "threshold", "xor", "counts"];

struct Shape {
    n: usize,
    label_noise: f64,
    missing: f64,
}

fn draw(family: &str, variant: usize, family_seed: u64, rng: &mut ChaCha8Rng) -> (Array2<f64>, Vec<usize>, usize) {
    let shape = Shape {
        n: 120 + 20 * variant,
        label_noise: 0.05,
        missing: match (family, variant) {
            ("counts", _) => 0.1,
            ("threshold", 1) => 0.05,
            _ => 0.0,
        },
    };
    let mut fam = ChaCha8Rng::seed_from_u64(family_seed);
    let (mut x, mut y, n_classes) = match family {
        "linear" => {
            let d = 6;
            let w: Vec<f64> = (0..d).map(|_| fam.sample(StandardNormal)).collect();
            let x = Array2::from_shape_fn((shape.n, d), |_| rng.sample::<f64, _>(StandardNormal));
            let noise = Normal::new(0.0, 0.3).expect("valid sd");
            let y = x
                .rows()
                .into_iter()
                .map(|r| usize::from(r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + noise.sample(rng) > 0.0))
                .collect();
            (x, y, 2)
        }
        "threshold" => {
            let cuts = [0.3 + 0.1 * fam.gen::<f64>(), 0.6 + 0.1 * fam.gen::<f64>()];
            let x = Array2::from_shape_fn((shape.n, 5), |_| rng.gen::<f64>());
            let y = x.column(0).iter().map(|&v| cuts.iter().filter(|&&c| v > c).count()).collect();
            (x, y, 3)
        }
        "xor" => {
            let x = Array2::from_shape_fn((shape.n, 4), |_| rng.gen_range(-1.0..1.0));
            let y = x.rows().into_iter().map(|r| usize::from((r[0] > 0.0) != (r[1] > 0.0))).collect();
            (x, y, 2)
        }
        _ => {
            let d = 8;
            let rates: Vec<Vec<f64>> = (0..3).map(|_| (0..d).map(|_| fam.gen_range(0.5..6.0)).collect()).collect();
            let y: Vec<usize> = (0..shape.n).map(|i| i % 3).collect();
            let x = Array2::from_shape_fn((shape.n, d), |(i, j)| {
                Poisson::new(rates[y[i]][j]).expect("positive rate").sample(rng)
            });
            (x, y, 3)
        }
    };
    for label in &mut y {
        if rng.gen_bool(shape.label_noise) {
            *label = rng.gen_range(0..n_classes);
        }
    }
    if shape.missing > 0.0 {
        x.mapv_inplace(|v| if rng.gen_bool(shape.missing) { f64::NAN } else { v });
    }
    (x, y, n_classes)
}

/// One dataset of `family`; `variant` selects the size and missingness.
pub fn generate(family: &str, variant: usize, seed: u64) -> Dataset {
    let family_seed = derive_seed(seed, &["family", family]);
    let name = format!("{family}-{}", (b'a' + variant as u8) as char);
    for attempt in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[&name, &attempt.to_string()]));
        let (x, y, n_classes) = draw(family, variant, family_seed, &mut rng);
        let classes = (0..n_classes).map(|c| format!("c{c}")).collect();
        if let Ok(d) = Dataset::new(name.clone(), x, y, classes) {
            return d;
        }
    }
    unreachable!("the attempt loop is unbounded")
}

/// `pairs` datasets per family, eight for the default of two.
pub fn benchmark(seed: u64, pairs: usize) -> Vec<Dataset> {
    FAMILIES
        .iter()
        .flat_map(|f| (0..pairs).map(move |v| generate(f, v, seed)))
        .collect()
}
