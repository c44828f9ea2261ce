use crate::error::{Error, Result};

/// One trained model per class, kept sorted by class id.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModelSet<M> {
    entries: Vec<(u32, M)>,
}

impl<M> ClassModelSet<M> {
    pub fn new(mut entries: Vec<(u32, M)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("a model set needs at least one class"));
        }
        entries.sort_by_key(|(c, _)| *c);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid("duplicate class in model set"));
        }
        Ok(ClassModelSet { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn classes(&self) -> Vec<u32> {
        self.entries.iter().map(|(c, _)| *c).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &M)> {
        self.entries.iter().map(|(c, m)| (*c, m))
    }

    pub fn get(&self, class: u32) -> Option<&M> {
        self.entries.iter().find(|(c, _)| *c == class).map(|(_, m)| m)
    }

    pub fn models(&self) -> impl Iterator<Item = &M> {
        self.entries.iter().map(|(_, m)| m)
    }
}

/// Label every signal with the class of smallest error. `errors[k][i]` is
/// the error of signal `i` under the `k`-th class of `classes`; classes
/// must be increasing so that ties resolve to the lowest id.
pub fn argmin_labels(classes: &[u32], errors: &[Vec<f64>]) -> Vec<u32> {
    let n = errors.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            let mut best = 0;
            for k in 1..classes.len() {
                if errors[k][i] < errors[best][i] {
                    best = k;
                }
            }
            classes[best]
        })
        .collect()
}
