//! Keyed dense vectors and their text file format.
//!
//! The file starts with a `<count> <dim>` header followed by one
//! `<key> <f1> ... <f_dim>` line per key. Components are written with the
//! shortest decimal representation that parses back to the same value, so a
//! write/read cycle is lossless.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::{squared_norm, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    keys: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<T>,
    dim: usize,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        Ok(EmbeddingMatrix { keys: Vec::new(), index: HashMap::new(), data: Vec::new(), dim })
    }

    /// Builds a matrix from keys and a row-major buffer of `keys.len() * dim`.
    pub fn from_rows(keys: Vec<String>, data: Vec<T>, dim: usize) -> Result<Self> {
        let mut m = Self::new(dim)?;
        if data.len() != keys.len() * dim {
            return Err(Error::invalid(format!(
                "{} keys with dim {dim} need {} values, got {}",
                keys.len(),
                keys.len() * dim,
                data.len()
            )));
        }
        m.keys.reserve(keys.len());
        m.data.reserve(data.len());
        for (key, row) in keys.into_iter().zip(data.chunks_exact(dim)) {
            m.push(key, row)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, key: impl Into<String>, vector: &[T]) -> Result<()> {
        let key = key.into();
        if key.is_empty() || key.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("embedding key {key:?} is empty or has whitespace")));
        }
        if vector.len() != self.dim {
            return Err(Error::invalid(format!("vector for {key} has length {}, expected {}", vector.len(), self.dim)));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("vector for {key} has a non-finite component")));
        }
        if self.index.contains_key(&key) {
            return Err(Error::invalid(format!("duplicate embedding key {key}")));
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&[T]> {
        self.index_of(key).map(|i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.keys.iter().map(String::as_str).zip(self.data.chunks_exact(self.dim))
    }

    pub fn squared_norm(&self, key: &str) -> Option<T> {
        self.get(key).map(squared_norm)
    }

    /// Mean squared norm over all rows; zero for an empty matrix.
    pub fn mean_squared_norm(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let total: T = self.data.chunks_exact(self.dim).map(squared_norm).sum();
        total / T::of(self.len() as f64)
    }

    /// Converts every component to another scalar type; fails if a value
    /// overflows the target type.
    pub fn cast<U: Scalar>(&self) -> Result<EmbeddingMatrix<U>> {
        let data: Vec<U> = self.data.iter().map(|&x| U::of(x.as_f64())).collect();
        Self::check_finite(&self.keys, &data, self.dim)?;
        Ok(EmbeddingMatrix { keys: self.keys.clone(), index: self.index.clone(), data, dim: self.dim })
    }

    /// Multiplies every component by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|x| *x *= factor);
        Self::check_finite(&m.keys, &m.data, m.dim)?;
        Ok(m)
    }

    fn check_finite<U: Scalar>(keys: &[String], data: &[U], dim: usize) -> Result<()> {
        match data.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(Error::invalid(format!("vector for {} has a non-finite component", keys[i / dim]))),
            None => Ok(()),
        }
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing `<count> <dim>` header"))??;
        let mut it = header.split_whitespace();
        let count: usize =
            it.next().and_then(|s| s.parse().ok()).ok_or_else(|| Error::parse(1, "cannot parse key count"))?;
        let dim: usize =
            it.next().and_then(|s| s.parse().ok()).ok_or_else(|| Error::parse(1, "cannot parse dimensionality"))?;
        if it.next().is_some() {
            return Err(Error::parse(1, "header has more than two fields"));
        }
        let mut m = Self::new(dim).map_err(|e| Error::parse(1, e.to_string()))?;
        m.keys.reserve(count);
        m.data.reserve(count * dim);
        let mut row = Vec::with_capacity(dim);
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().expect("non-blank line has a field");
            row.clear();
            for p in parts {
                let x: T = p.parse().map_err(|_| Error::parse(lineno, format!("cannot parse component {p:?}")))?;
                row.push(x);
            }
            m.push(key, &row).map_err(|e| Error::parse(lineno, e.to_string()))?;
        }
        if m.len() != count {
            return Err(Error::parse(1, format!("header declares {count} keys, file has {}", m.len())));
        }
        Ok(m)
    }

    /// Reads a headerless `<key> <f1> ... <f_dim>` file (GloVe's text output).
    pub fn read_headerless<R: BufRead>(reader: R) -> Result<Self> {
        let mut m: Option<Self> = None;
        let mut row = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().expect("non-blank line has a field");
            row.clear();
            for p in parts {
                row.push(p.parse::<T>().map_err(|_| Error::parse(idx + 1, format!("cannot parse component {p:?}")))?);
            }
            let m = match &mut m {
                Some(m) => m,
                None => m.insert(Self::new(row.len()).map_err(|e| Error::parse(idx + 1, e.to_string()))?),
            };
            m.push(key, &row).map_err(|e| Error::parse(idx + 1, e.to_string()))?;
        }
        m.ok_or_else(|| Error::invalid("embedding file has no vectors"))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (key, row) in self.iter() {
            w.write_all(key.as_bytes())?;
            for x in row {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
