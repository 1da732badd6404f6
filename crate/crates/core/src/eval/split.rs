//! Seeded, label-balanced fold assignment.

use rand::seq::SliceRandom;
use rand::Rng;

/// Two folds with the positives and negatives of `member` each dealt
/// alternately. Indices within each fold are sorted.
pub fn stratified_binary_split<R: Rng>(member: &[bool], rng: &mut R) -> [Vec<usize>; 2] {
    let mut folds = [Vec::new(), Vec::new()];
    for want in [true, false] {
        let mut group: Vec<usize> = (0..member.len()).filter(|&i| member[i] == want).collect();
        group.shuffle(rng);
        let offset = rng.gen_range(0..2);
        for (n, i) in group.into_iter().enumerate() {
            folds[(n + offset) % 2].push(i);
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    folds
}

/// Partitions points into `k` folds, greedily balancing per-class positive
/// counts for multi-label data.
///
/// Points are visited rarest-label first; each goes to the fold holding the
/// fewest members of its rarest class, ties broken by fold size and then at
/// random. Unlabeled points fill the smallest folds.
pub fn stratified_folds<R: Rng>(
    labels: &[Vec<usize>],
    num_classes: usize,
    k: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    assert!(k >= 1, "need at least one fold");
    let mut totals = vec![0usize; num_classes];
    for l in labels {
        for &c in l {
            totals[c] += 1;
        }
    }
    let rarest = |l: &[usize]| l.iter().copied().min_by_key(|&c| (totals[c], c));

    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(rng);
    order.sort_by_key(|&i| rarest(&labels[i]).map_or(usize::MAX, |c| totals[c]));

    let mut counts = vec![vec![0usize; num_classes]; k];
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in order {
        let key = |f: usize| {
            let class_count = rarest(&labels[i]).map_or(0, |c| counts[f][c]);
            (class_count, folds[f].len())
        };
        let best = (0..k).map(key).min().expect("k >= 1");
        let ties: Vec<usize> = (0..k).filter(|&f| key(f) == best).collect();
        let f = *ties.choose(rng).expect("non-empty");
        for &c in &labels[i] {
            counts[f][c] += 1;
        }
        folds[f].push(i);
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    folds
}
