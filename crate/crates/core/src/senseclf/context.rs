use std::io::{BufRead, Read, Write};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Contextual embeddings keyed by instance id.
///
/// File format: a `CTXSTORE 1 <count> <dim>` header, optional `#` comment
/// lines (e.g. the model revision the vectors came from), then
/// `instance_id <f1> ... <f_dim>` per line.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextStore<T> {
    vectors: EmbeddingMatrix<T>,
    comments: Vec<String>,
}

impl<T: Scalar> ContextStore<T> {
    pub fn new(dim: usize) -> Result<Self> {
        Ok(ContextStore { vectors: EmbeddingMatrix::new(dim)?, comments: Vec::new() })
    }

    /// Header comments, without the leading `#`.
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn add_comment(&mut self, text: impl Into<String>) -> Result<()> {
        let text = text.into();
        if text.contains(['\n', '\r']) {
            return Err(Error::invalid("comment contains a newline"));
        }
        self.comments.push(text);
        Ok(())
    }

    pub fn insert(&mut self, instance_id: impl Into<String>, vector: &[T]) -> Result<()> {
        self.vectors.push(instance_id, vector)
    }

    pub fn get(&self, instance_id: &str) -> Option<&[T]> {
        self.vectors.get(instance_id)
    }

    pub fn contains(&self, instance_id: &str) -> bool {
        self.vectors.contains(instance_id)
    }

    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn as_matrix(&self) -> &EmbeddingMatrix<T> {
        &self.vectors
    }

    pub fn read<R: BufRead>(mut reader: R) -> Result<Self> {
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "CTXSTORE" {
            return Err(Error::parse(1, "expected `CTXSTORE 1 <count> <dim>` header"));
        }
        if fields[1] != "1" {
            return Err(Error::parse(1, format!("unsupported context store version {}", fields[1])));
        }
        let count = fields[2].parse::<usize>().map_err(|_| Error::parse(1, "bad count"))?;
        let dim = fields[3].parse::<usize>().map_err(|_| Error::parse(1, "bad dimensionality"))?;
        let mut comments = Vec::new();
        while reader.fill_buf()?.first() == Some(&b'#') {
            let mut line = String::new();
            reader.read_line(&mut line)?;
            let line = line.trim_end_matches(['\n', '\r']);
            comments.push(line[1..].to_owned());
        }
        // reuse the embedding reader for the body
        let body = format!("{count} {dim}\n");
        let vectors = EmbeddingMatrix::read(body.as_bytes().chain(reader))?;
        Ok(ContextStore { vectors, comments })
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "CTXSTORE 1 {} {}", self.len(), self.dim())?;
        for c in &self.comments {
            writeln!(w, "#{c}")?;
        }
        for (key, row) in self.vectors.iter() {
            w.write_all(key.as_bytes())?;
            for x in row {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

impl<T: Scalar> From<EmbeddingMatrix<T>> for ContextStore<T> {
    fn from(vectors: EmbeddingMatrix<T>) -> Self {
        ContextStore { vectors, comments: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_header_check() {
        let mut s = ContextStore::<f64>::new(3).unwrap();
        s.insert("d0:s0:t1", &[0.25, -1.5, 1e-300]).unwrap();
        s.insert("d0:s1:t0", &[1.0, 2.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        assert!(buf.starts_with(b"CTXSTORE 1 2 3\n"));
        let back = ContextStore::<f64>::read(buf.as_slice()).unwrap();
        assert_eq!(back, s);

        assert!(ContextStore::<f64>::read("2 3\n".as_bytes()).is_err());
        assert!(ContextStore::<f64>::read("CTXSTORE 2 0 3\n".as_bytes()).is_err());
    }

    #[test]
    fn comments_survive_round_trip() {
        let text = "CTXSTORE 1 1 2\n# model bert-large-cased rev abc123\n#layers -4..-1\nx 1 2\n";
        let s = ContextStore::<f64>::read(text.as_bytes()).unwrap();
        assert_eq!(s.comments(), [" model bert-large-cased rev abc123", "layers -4..-1"]);
        assert_eq!(s.get("x"), Some(&[1.0, 2.0][..]));
        let mut buf = Vec::new();
        s.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
        let mut t = ContextStore::<f64>::new(2).unwrap();
        assert!(t.add_comment("two\nlines").is_err());
    }

    #[test]
    fn rejects_wrong_dimension() {
        let text = "CTXSTORE 1 1 2\nx 1 2 3\n";
        assert!(ContextStore::<f32>::read(text.as_bytes()).is_err());
    }
}
