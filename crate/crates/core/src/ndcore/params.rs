use std::collections::BTreeMap;

use super::Tensor;
use crate::{Error, Result};

/// A trainable tensor with an optional element-wise update mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub value: Tensor,
    /// `true` where the optimizer may write. `None` means fully trainable.
    mask: Option<Vec<bool>>,
}

impl Param {
    pub fn new(value: Tensor) -> Self {
        Param { value, mask: None }
    }

    pub fn is_trainable(&self, index: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[index])
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn frozen_indices(&self) -> Vec<usize> {
        match &self.mask {
            None => Vec::new(),
            Some(m) => m
                .iter()
                .enumerate()
                .filter(|(_, &t)| !t)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub fn freeze_index(&mut self, index: usize) {
        let len = self.value.len();
        self.mask.get_or_insert_with(|| vec![true; len])[index] = false;
    }

    pub fn freeze_row(&mut self, row: usize) {
        let w = self.value.row_len();
        for i in row * w..(row + 1) * w {
            self.freeze_index(i);
        }
    }
}

/// Named parameters in a deterministic (sorted) order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    params: BTreeMap<String, Param>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor) -> Result<()> {
        let name = name.into();
        if self.params.contains_key(&name) {
            return Err(Error::DuplicateId {
                kind: "parameter",
                id: name,
            });
        }
        value.check_finite(&name)?;
        self.params.insert(name, Param::new(value));
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn param(&self, name: &str) -> Result<&Param> {
        self.params.get(name).ok_or_else(|| missing(name))
    }

    pub fn param_mut(&mut self, name: &str) -> Result<&mut Param> {
        self.params.get_mut(name).ok_or_else(|| missing(name))
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.param(name).map(|p| &p.value)
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor> {
        self.param_mut(name).map(|p| &mut p.value)
    }

    pub fn freeze_row(&mut self, name: &str, row: usize) -> Result<()> {
        let p = self.param_mut(name)?;
        if row >= p.value.rows() {
            return Err(Error::OutOfRange {
                what: "parameter rows",
                index: row,
                size: p.value.rows(),
            });
        }
        p.freeze_row(row);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Param)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Param)> {
        self.params.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn num_scalars(&self) -> usize {
        self.params.values().map(|p| p.value.len()).sum()
    }

    pub(crate) fn insert_param(&mut self, name: String, param: Param) {
        self.params.insert(name, param);
    }
}

fn missing(name: &str) -> Error {
    Error::config(format!("no parameter named `{name}`"))
}

/// Gradient buffers shaped like a [`ParamStore`].
#[derive(Clone, Debug, PartialEq)]
pub struct Grads {
    grads: BTreeMap<String, Tensor>,
}

impl Grads {
    pub fn zeros_like(params: &ParamStore) -> Self {
        Grads {
            grads: params
                .iter()
                .map(|(k, p)| (k.to_string(), Tensor::zeros(p.value.shape())))
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.grads.get(name).ok_or_else(|| missing(name))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor> {
        self.grads.get_mut(name).ok_or_else(|| missing(name))
    }

    /// Mutable access to several distinct buffers at once.
    pub fn get_disjoint_mut<const N: usize>(
        &mut self,
        names: [&str; N],
    ) -> Result<[&mut Tensor; N]> {
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::config(format!("gradient `{a}` requested twice")));
            }
        }
        let mut slots: [Option<&mut Tensor>; N] = std::array::from_fn(|_| None);
        for (k, v) in self.grads.iter_mut() {
            if let Some(i) = names.iter().position(|n| *n == k) {
                slots[i] = Some(v);
            }
        }
        let mut out = Vec::with_capacity(N);
        for (slot, name) in slots.into_iter().zip(names) {
            out.push(slot.ok_or_else(|| missing(name))?);
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.grads.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor)> {
        self.grads.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn scale(&mut self, factor: f64) {
        for g in self.grads.values_mut() {
            g.data_mut().iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn zero(&mut self) {
        for g in self.grads.values_mut() {
            g.data_mut().iter_mut().for_each(|x| *x = 0.0);
        }
    }
}
