//! Converters from the unified WSD evaluation framework XML and from
//! headerless vector files.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::corpus::{Corpus, Pos, Token};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn xml_err(e: impl std::fmt::Display) -> Error {
    Error::invalid(format!("XML: {e}"))
}

fn field(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join("_")
}

struct Pending {
    lemma: String,
    pos: String,
    instance: Option<String>,
    surface: String,
}

fn start_token(e: &BytesStart<'_>, is_instance: bool) -> Result<Pending> {
    let mut p = Pending { lemma: String::new(), pos: String::new(), instance: None, surface: String::new() };
    for attr in e.attributes() {
        let attr = attr.map_err(xml_err)?;
        let value = attr.unescape_value().map_err(xml_err)?.into_owned();
        match attr.key.as_ref() {
            b"lemma" => p.lemma = value,
            b"pos" => p.pos = value,
            b"id" if is_instance => p.instance = Some(value),
            _ => {}
        }
    }
    Ok(p)
}

/// Builds a corpus from `<sentence>`/`<wf>`/`<instance>` markup. Instances
/// take the first sense listed for their id in `gold`; instances without a
/// key keep their id but stay unannotated. Whitespace inside a field becomes
/// `_`.
pub fn corpus_from_xml<R: BufRead>(reader: R, gold: &BTreeMap<String, Vec<String>>) -> Result<Corpus> {
    let mut xml = Reader::from_reader(reader);
    let mut buf = Vec::new();
    let mut sentences = Vec::new();
    let mut sentence: Vec<Token> = Vec::new();
    let mut pending: Option<Pending> = None;
    loop {
        match xml.read_event_into(&mut buf).map_err(xml_err)? {
            Event::Start(e) => match e.name().as_ref() {
                b"wf" => pending = Some(start_token(&e, false)?),
                b"instance" => pending = Some(start_token(&e, true)?),
                _ => {}
            },
            Event::Text(t) => {
                if let Some(p) = pending.as_mut() {
                    p.surface.push_str(&t.unescape().map_err(xml_err)?);
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"wf" | b"instance" => {
                    let p = pending.take().ok_or_else(|| Error::invalid("unbalanced token element"))?;
                    let surface = field(&p.surface);
                    if surface.is_empty() {
                        continue;
                    }
                    let lemma = if p.lemma.trim().is_empty() { surface.clone() } else { field(&p.lemma) };
                    let sense = p.instance.as_ref().and_then(|id| gold.get(id)).and_then(|k| k.first().cloned());
                    let mut tok = Token::new(surface, lemma, Pos::from_tag(&p.pos), sense)?;
                    if let Some(id) = p.instance {
                        tok = tok.with_instance(id)?;
                    }
                    sentence.push(tok);
                }
                b"sentence" if !sentence.is_empty() => sentences.push(std::mem::take(&mut sentence)),
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !sentence.is_empty() {
        sentences.push(sentence);
    }
    Corpus::new(sentences)
}

/// Reads a vector file with or without the `<count> <dim>` header.
pub fn read_embeddings_any<T: Scalar, R: BufRead>(mut reader: R) -> Result<EmbeddingMatrix<T>> {
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let f: Vec<&str> = first.split_whitespace().collect();
    let headed = f.len() == 2 && f.iter().all(|x| x.parse::<usize>().is_ok());
    let chained = first.as_bytes().chain(reader);
    if headed {
        EmbeddingMatrix::read(chained)
    } else {
        EmbeddingMatrix::read_headerless(chained)
    }
}

/// Rewrites any vector file in the headed format; returns the row count.
pub fn convert_embeddings<R: BufRead, W: Write>(reader: R, writer: W) -> Result<usize> {
    let emb = read_embeddings_any::<f64, _>(reader)?;
    emb.write(writer)?;
    Ok(emb.len())
}
