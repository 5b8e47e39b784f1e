use crate::datasets::{derive_seed, SeededRng};
use crate::error::{Error, Result};

fn groups(n: usize, labels: Option<&[usize]>) -> Result<Vec<Vec<usize>>> {
    match labels {
        None => Ok(vec![(0..n).collect()]),
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: labels.len(),
                });
            }
            let k = labels.iter().max().map_or(0, |m| m + 1);
            let mut g = vec![Vec::new(); k];
            for (i, &l) in labels.iter().enumerate() {
                g[l].push(i);
            }
            Ok(g.into_iter().filter(|v| !v.is_empty()).collect())
        }
    }
}

/// Randomized train/test split with `round(ratio * n)` training items.
///
/// With labels the split is stratified: each class contributes `floor(ratio * n_c)` items and
/// the leftover training slots go to the classes with the largest remainders (ties to the
/// smaller class). Both index lists are returned sorted.
pub fn split_train_test(
    n: usize,
    ratio: f64,
    stratify: Option<&[usize]>,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::InvalidInput(format!("split ratio must be in [0, 1], got {ratio}")));
    }
    let mut classes = groups(n, stratify)?;
    if let Some(labels) = stratify {
        if let Some(g) = classes.iter().find(|g| g.len() < 2) {
            return Err(Error::TooFewInClass {
                class: labels[g[0]],
                count: g.len(),
            });
        }
    }
    let target = (ratio * n as f64).round() as usize;
    let mut take: Vec<usize> = classes
        .iter()
        .map(|g| (ratio * g.len() as f64).floor() as usize)
        .collect();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    let rem = |c: usize| ratio * classes[c].len() as f64 - take[c] as f64;
    order.sort_by(|&a, &b| rem(b).total_cmp(&rem(a)).then(a.cmp(&b)));
    let mut missing = target.saturating_sub(take.iter().sum());
    for &c in order.iter().cycle().take(order.len() * 2) {
        if missing == 0 {
            break;
        }
        if take[c] < classes[c].len() {
            take[c] += 1;
            missing -= 1;
        }
    }
    let mut train = Vec::with_capacity(target);
    let mut test = Vec::with_capacity(n - target);
    for (c, g) in classes.iter_mut().enumerate() {
        SeededRng::new(derive_seed(seed, &[c as u64])).shuffle(g);
        train.extend_from_slice(&g[..take[c]]);
        test.extend_from_slice(&g[take[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Partitions `0..n` into `k` folds whose sizes differ by at most one.
///
/// With labels, each class is shuffled and dealt round-robin across folds (continuing where
/// the previous class stopped), so every fold gets a near-equal share of every class.
pub fn k_fold(n: usize, k: usize, stratify: Option<&[usize]>, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k == 0 || k > n {
        return Err(Error::TooManyFolds { k, n });
    }
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for (c, mut g) in groups(n, stratify)?.into_iter().enumerate() {
        SeededRng::new(derive_seed(seed, &[c as u64])).shuffle(&mut g);
        for i in g {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}
