use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::DatasetManifest;
use crate::seed::{self, stage};
use crate::{Error, Result};

/// Stratified fold assignment. Entries are grouped into (class, SNR) cells,
/// shuffled within each cell and dealt round-robin; the dealing position
/// carries over from one cell to the next so that per-class and overall
/// fold sizes also stay within one of each other.
pub fn kfold_split(manifest: &DatasetManifest, k: usize, seed: u64) -> Result<DatasetManifest> {
    if k < 2 {
        return Err(Error::param("k must be at least 2"));
    }
    let mut cells: BTreeMap<(usize, i32), Vec<usize>> = BTreeMap::new();
    for (i, e) in manifest.entries.iter().enumerate() {
        cells.entry((e.label, e.snr_db)).or_default().push(i);
    }
    let smallest = cells.values().map(Vec::len).min().unwrap_or(0);
    if smallest < k {
        return Err(Error::Stratification { k, smallest });
    }

    let mut out = manifest.clone();
    let mut offset = 0usize;
    for ((label, snr), mut members) in cells {
        let cell_seed = seed::derive(seed, &[stage::FOLD, label as u64, snr as i64 as u64]);
        members.shuffle(&mut seed::rng(cell_seed));
        for (pos, &i) in members.iter().enumerate() {
            out.entries[i].fold = Some((offset + pos) % k);
        }
        offset = (offset + members.len()) % k;
    }
    out.k = Some(k);
    out.fold_seed = Some(seed);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::manifest::{ImageShape, ManifestEntry};
    use crate::dataset::DatasetConfig;
    use crate::wavegen::ModulationScheme;
    use proptest::prelude::*;

    fn synthetic(cells: &[(ModulationScheme, i32, usize)]) -> DatasetManifest {
        let mut entries = Vec::new();
        for &(scheme, snr, n) in cells {
            for i in 0..n {
                entries.push(ManifestEntry {
                    path: format!("{snr}/{scheme}/{i}.png"),
                    scheme,
                    label: scheme.index(),
                    snr_db: snr,
                    frame_seed: i as u64,
                    fold: None,
                    sha256: String::new(),
                });
            }
        }
        let shape = ImageShape {
            height: 1,
            width: 1,
            channels: 1,
        };
        DatasetManifest::new(DatasetConfig::default(), shape, entries)
    }

    fn counts(
        m: &DatasetManifest,
        k: usize,
        filter: impl Fn(&ManifestEntry) -> bool,
    ) -> Vec<usize> {
        let mut c = vec![0; k];
        for e in m.entries.iter().filter(|e| filter(e)) {
            c[e.fold.unwrap()] += 1;
        }
        c
    }

    #[test]
    fn even_division() {
        let m = kfold_split(&synthetic(&[(ModulationScheme::Bpsk, 10, 100)]), 5, 1).unwrap();
        assert_eq!(counts(&m, 5, |_| true), vec![20; 5]);
    }

    #[test]
    fn paper_sizing() {
        let cells: Vec<_> = ModulationScheme::ALL
            .iter()
            .map(|&s| (s, 10, 1940))
            .collect();
        let m = kfold_split(&synthetic(&cells), 5, 7).unwrap();
        for s in ModulationScheme::ALL {
            assert_eq!(counts(&m, 5, |e| e.scheme == s), vec![388; 5]);
        }
    }

    #[test]
    fn too_few_for_k() {
        let m = synthetic(&[
            (ModulationScheme::Bpsk, 10, 8),
            (ModulationScheme::Qpsk, 10, 3),
        ]);
        assert!(matches!(
            kfold_split(&m, 5, 0),
            Err(Error::Stratification { k: 5, smallest: 3 })
        ));
        assert!(kfold_split(&m, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn stratified_partition(
            sizes in prop::collection::vec(5usize..23, 1..6),
            k in 2usize..6,
            seed in any::<u64>(),
        ) {
            let cells: Vec<_> = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| (ModulationScheme::ALL[i % 3], 5 * (i / 3) as i32, n))
                .collect();
            let m = kfold_split(&synthetic(&cells), k, seed).unwrap();
            // every entry in exactly one fold
            prop_assert!(m.entries.iter().all(|e| e.fold.unwrap() < k));
            for &(scheme, snr, n) in &cells {
                let c = counts(&m, k, |e| e.scheme == scheme && e.snr_db == snr);
                let mean = n as f64 / k as f64;
                prop_assert!(c.iter().all(|&x| (x as f64 - mean).abs() < 1.0));
            }
            let all = counts(&m, k, |_| true);
            prop_assert!(all.iter().max().unwrap() - all.iter().min().unwrap() <= 1);
            let mut classes: Vec<_> = cells.iter().map(|c| c.0).collect();
            classes.dedup();
            for s in classes {
                let c = counts(&m, k, |e| e.scheme == s);
                prop_assert!(c.iter().max().unwrap() - c.iter().min().unwrap() <= 1);
            }
            prop_assert_eq!(kfold_split(&m, k, seed).unwrap(), m);
        }
    }
}
