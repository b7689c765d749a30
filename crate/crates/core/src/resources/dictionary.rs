use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;

/// Translations from words of the language being covered into reference
/// wordnet lemmas, together with the exact transpose.
///
/// The TSV's first column is the word being translated, the second its
/// reference-language equivalent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualDictionary {
    forward: BTreeMap<String, Vec<String>>,
    inverse: BTreeMap<String, BTreeSet<String>>,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: AsRef<str>>(pairs: impl IntoIterator<Item = (S, S)>) -> Self {
        let mut dict = Self::new();
        for (source, target) in pairs {
            dict.insert(source.as_ref(), target.as_ref());
        }
        dict
    }

    /// Adds a pair; duplicates are ignored. Returns whether it was new.
    pub fn insert(&mut self, source: &str, target: &str) -> bool {
        let targets = self.forward.entry(source.to_string()).or_default();
        if targets.iter().any(|t| t == target) {
            return false;
        }
        targets.push(target.to_string());
        self.inverse
            .entry(target.to_string())
            .or_default()
            .insert(source.to_string());
        true
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut dict = Self::new();
        io::for_each_line(path, |line_no, line| {
            if line.trim().is_empty() {
                return Ok(());
            }
            let mut cols = line.split('\t');
            let source = cols.next().map(str::trim).unwrap_or("");
            let target = cols.next().map(str::trim).unwrap_or("");
            if source.is_empty() || target.is_empty() {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected `source<TAB>target`",
                ));
            }
            dict.insert(source, target);
            Ok(())
        })?;
        Ok(dict)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for (source, targets) in &self.forward {
                for target in targets {
                    writeln!(out, "{source}\t{target}")?;
                }
            }
            Ok(())
        })
    }

    /// Reference-language translations of `source`, in first-seen order.
    pub fn translate(&self, source: &str) -> &[String] {
        self.forward.get(source).map_or(&[], Vec::as_slice)
    }

    /// Words whose translations include `target`.
    pub fn inverse(&self, target: &str) -> impl Iterator<Item = &str> {
        self.inverse
            .get(target)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.forward.keys().map(String::as_str)
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.inverse.keys().map(String::as_str)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.forward
            .iter()
            .flat_map(|(s, ts)| ts.iter().map(move |t| (s.as_str(), t.as_str())))
    }

    pub fn len(&self) -> usize {
        self.forward.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn forward_and_inverse() {
        let d = BilingualDictionary::from_pairs([("x", "a"), ("x", "b")]);
        assert_eq!(d.translate("x"), ["a", "b"]);
        assert_eq!(d.inverse("a").collect::<Vec<_>>(), ["x"]);
        assert!(d.translate("y").is_empty());
    }

    #[test]
    fn duplicate_rows_collapse() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x\ta\nx\ta").unwrap();
        let d = BilingualDictionary::load(f.path()).unwrap();
        assert_eq!(d.translate("x"), ["a"]);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn missing_column_reports_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "x\ta\n\ny").unwrap();
        match BilingualDictionary::load(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn inverse_is_transpose(pairs in prop::collection::vec(("[a-e]", "[p-t]"), 0..40)) {
            let d = BilingualDictionary::from_pairs(pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())));
            for (s, t) in &pairs {
                prop_assert!(d.translate(s).contains(t));
                prop_assert!(d.inverse(t).any(|x| x == s));
            }
            for t in d.targets() {
                for s in d.inverse(t) {
                    prop_assert!(d.translate(s).iter().any(|x| x == t));
                }
            }
            for s in d.sources() {
                prop_assert!(!d.translate(s).is_empty());
            }
        }
    }
}
