//! Stratified shuffle splits, optionally grouped by subject.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::FrailtyLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitOptions {
    pub test_frac: f64,
    pub folds: usize,
    pub seed: u64,
    /// Keep every item of a subject on one side of each split.
    pub group_by_subject: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            test_frac: 0.1,
            folds: 5,
            seed: 0,
            group_by_subject: false,
        }
    }
}

impl SplitOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_frac > 0.0 && self.test_frac < 1.0) {
            return Err(Error::InvalidConfig(format!("test_frac {} outside (0, 1)", self.test_frac)));
        }
        if self.folds == 0 {
            return Err(Error::InvalidConfig("folds must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    /// Item ids, ascending.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// What the splitter needs to know about an item.
#[derive(Debug, Clone, Copy)]
pub struct SplitItem<'a> {
    pub id: usize,
    pub label: FrailtyLabel,
    pub subject_id: &'a str,
}

fn fold_rng(seed: u64, fold: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn test_count(n: usize, frac: f64) -> usize {
    ((n as f64 * frac).round() as usize).clamp(1, n - 1)
}

/// `folds` independent shuffled train/test partitions preserving class
/// proportions (to within one item per class in item mode). Deterministic
/// in `opts.seed`.
pub fn stratified_split(items: &[SplitItem<'_>], opts: &SplitOptions) -> Result<Vec<FoldSplit>> {
    opts.validate()?;
    let mut by_class: BTreeMap<FrailtyLabel, Vec<&SplitItem<'_>>> = BTreeMap::new();
    for it in items {
        by_class.entry(it.label).or_default().push(it);
    }
    for (label, members) in &by_class {
        if members.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "class {} has {} item(s); stratified split needs at least 2",
                label.as_str(),
                members.len()
            )));
        }
    }

    (0..opts.folds)
        .map(|fold| {
            let mut rng = fold_rng(opts.seed, fold);
            let mut train = Vec::new();
            let mut test = Vec::new();
            for members in by_class.values() {
                let (tr, te) = if opts.group_by_subject {
                    split_groups(members, opts.test_frac, &mut rng)?
                } else {
                    let mut ids: Vec<usize> = members.iter().map(|m| m.id).collect();
                    ids.sort_unstable();
                    ids.shuffle(&mut rng);
                    let k = test_count(ids.len(), opts.test_frac);
                    let te = ids[..k].to_vec();
                    (ids[k..].to_vec(), te)
                };
                train.extend(tr);
                test.extend(te);
            }
            train.sort_unstable();
            test.sort_unstable();
            Ok(FoldSplit {
                fold_id: fold,
                train,
                test,
            })
        })
        .collect()
}

fn split_groups(
    members: &[&SplitItem<'_>],
    test_frac: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for m in members {
        groups.entry(m.subject_id).or_default().push(m.id);
    }
    if groups.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "subject-grouped split needs at least 2 subjects per class, got {}",
            groups.len()
        )));
    }
    let mut order: Vec<&str> = groups.keys().copied().collect();
    order.shuffle(rng);
    let target = test_count(members.len(), test_frac);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, subject) in order.iter().enumerate() {
        let ids = &groups[subject];
        // Always leave the last subject for training.
        if test.len() < target && i + 1 < order.len() {
            test.extend(ids);
        } else {
            train.extend(ids);
        }
    }
    Ok((train, test))
}
