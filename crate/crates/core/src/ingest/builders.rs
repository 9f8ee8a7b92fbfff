use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::{normalize_in_place, Content, Dataset, RawCorpus, Tokenizer};
use crate::error::{Error, Result};

/// Token -> dense vector lookup for mean-of-static-vectors features.
#[derive(Debug, Clone)]
pub struct VectorTable {
    dim: usize,
    index: HashMap<String, usize>,
    values: Vec<f64>,
}

impl VectorTable {
    pub fn new(entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let dim = entries.first().map(|(_, v)| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::data(
                "vector table is empty or has zero-dimensional vectors",
            ));
        }
        let mut index = HashMap::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len() * dim);
        for (token, v) in entries {
            if v.len() != dim {
                return Err(Error::data(format!(
                    "vector for token `{token}` has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            // Later duplicates of a token are ignored.
            if index.contains_key(&token) {
                continue;
            }
            index.insert(token, values.len() / dim);
            values.extend(v);
        }
        Ok(Self { dim, index, values })
    }

    /// Parses `token v1 v2 ... vd` lines.
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::data(format!("vector table: {e}")))?;
            let mut parts = line.split_whitespace();
            let Some(token) = parts.next() else { continue };
            let v = parts
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::data(format!("vector table line {}: {e}", lineno + 1)))?;
            entries.push((token.to_string(), v));
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(f))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.values[i * self.dim..(i + 1) * self.dim])
    }
}

/// How to turn corpus records into representation vectors.
#[derive(Debug, Clone)]
pub enum RepresentationSpec {
    BagOfWords {
        tokenizer: Tokenizer,
    },
    MeanStatic {
        table: Arc<VectorTable>,
        tokenizer: Tokenizer,
    },
    Dense,
    /// Keeps the listed coordinates of dense vectors.
    Coordinates {
        indices: Vec<usize>,
    },
}

impl RepresentationSpec {
    pub fn name(&self) -> String {
        match self {
            RepresentationSpec::BagOfWords { .. } => "bow".into(),
            RepresentationSpec::MeanStatic { .. } => "mean-static".into(),
            RepresentationSpec::Dense => "dense".into(),
            RepresentationSpec::Coordinates { indices } => {
                let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
                format!("coords-{}", idx.join("-"))
            }
        }
    }

    pub fn build(&self, corpus: &RawCorpus) -> Result<Dataset> {
        match self {
            RepresentationSpec::BagOfWords { tokenizer } => build_bow(corpus, tokenizer),
            RepresentationSpec::MeanStatic { table, tokenizer } => {
                build_mean_static(corpus, table, tokenizer)
            }
            RepresentationSpec::Dense => build_dense(corpus),
            RepresentationSpec::Coordinates { indices } => build_coordinates(corpus, indices),
        }
    }
}

fn texts(corpus: &RawCorpus) -> Result<Vec<&str>> {
    corpus
        .records()
        .iter()
        .map(|r| match &r.content {
            Content::Text(t) => Ok(t.as_str()),
            Content::Vector(_) => Err(Error::data(format!(
                "record `{}` carries a vector, but this representation needs text",
                r.id
            ))),
        })
        .collect()
}

fn vectors(corpus: &RawCorpus) -> Result<(Vec<&[f64]>, usize)> {
    let mut out = Vec::with_capacity(corpus.len());
    let mut dim = None;
    for r in corpus.records() {
        let Content::Vector(v) = &r.content else {
            return Err(Error::data(format!(
                "record `{}` carries text, but this representation needs a vector",
                r.id
            )));
        };
        match dim {
            None => dim = Some(v.len()),
            Some(d) if d != v.len() => {
                return Err(Error::data(format!(
                    "record `{}` has dimension {}, expected {d}",
                    r.id,
                    v.len()
                )))
            }
            _ => {}
        }
        out.push(v.as_slice());
    }
    Ok((out, dim.unwrap_or(0)))
}

/// Term-count vectors over the corpus vocabulary (ordered by first occurrence).
pub fn build_bow(corpus: &RawCorpus, tokenizer: &Tokenizer) -> Result<Dataset> {
    let texts = texts(corpus)?;
    let docs: Vec<Vec<String>> = texts.par_iter().map(|t| tokenizer.tokens(t)).collect();
    if let Some(i) = docs.iter().position(Vec::is_empty) {
        return Err(Error::data(format!(
            "document `{}` is empty after tokenization",
            corpus.records()[i].id
        )));
    }

    let mut vocab: HashMap<&str, usize> = HashMap::new();
    let mut encoded = Vec::with_capacity(docs.len());
    for doc in &docs {
        let ids: Vec<usize> = doc
            .iter()
            .map(|tok| {
                let next = vocab.len();
                *vocab.entry(tok.as_str()).or_insert(next)
            })
            .collect();
        encoded.push(ids);
    }
    let dim = vocab.len();

    let mut rows = vec![0.0; docs.len() * dim];
    rows.par_chunks_mut(dim)
        .zip(encoded.par_iter())
        .for_each(|(row, ids)| {
            for &j in ids {
                row[j] += 1.0;
            }
        });
    Dataset::from_raw_rows(
        corpus.ids(),
        rows,
        dim,
        corpus.labels(),
        corpus.classes().clone(),
    )
}

/// Mean of in-vocabulary static token vectors, ℓ2-normalized.
pub fn build_mean_static(
    corpus: &RawCorpus,
    table: &VectorTable,
    tokenizer: &Tokenizer,
) -> Result<Dataset> {
    let texts = texts(corpus)?;
    let dim = table.dim();
    let rows: Vec<Result<Vec<f64>>> = texts
        .par_iter()
        .zip(corpus.records().par_iter())
        .map(|(text, rec)| {
            let mut sum = vec![0.0; dim];
            let mut count = 0usize;
            for tok in tokenizer.tokens(text) {
                if let Some(v) = table.get(&tok) {
                    for (s, x) in sum.iter_mut().zip(v) {
                        *s += x;
                    }
                    count += 1;
                }
            }
            if count == 0 {
                return Err(Error::data(format!(
                    "document `{}` has no in-vocabulary tokens",
                    rec.id
                )));
            }
            let c = count as f64;
            sum.iter_mut().for_each(|s| *s /= c);
            if !normalize_in_place(&mut sum) {
                return Err(Error::data(format!(
                    "document `{}` has a zero mean vector",
                    rec.id
                )));
            }
            Ok(sum)
        })
        .collect();
    let mut flat = Vec::with_capacity(corpus.len() * dim);
    for r in rows {
        flat.extend(r?);
    }
    Dataset::new(
        corpus.ids(),
        flat,
        dim,
        corpus.labels(),
        corpus.classes().clone(),
    )
}

/// ℓ2-normalized copies of precomputed dense vectors.
pub fn build_dense(corpus: &RawCorpus) -> Result<Dataset> {
    let (vecs, dim) = vectors(corpus)?;
    if dim == 0 {
        return Err(Error::data("dense vectors must have positive dimension"));
    }
    let rows: Vec<f64> = vecs.into_iter().flatten().copied().collect();
    Dataset::from_raw_rows(
        corpus.ids(),
        rows,
        dim,
        corpus.labels(),
        corpus.classes().clone(),
    )
}

/// Projection of dense vectors onto selected coordinates, ℓ2-normalized.
pub fn build_coordinates(corpus: &RawCorpus, indices: &[usize]) -> Result<Dataset> {
    let (vecs, dim) = vectors(corpus)?;
    if indices.is_empty() {
        return Err(Error::config(
            "coordinate projection needs at least one index",
        ));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
        return Err(Error::config(format!(
            "coordinate index {bad} out of range for dimension {dim}"
        )));
    }
    let rows: Vec<f64> = vecs
        .iter()
        .flat_map(|v| indices.iter().map(move |&i| v[i]))
        .collect();
    Dataset::from_raw_rows(
        corpus.ids(),
        rows,
        indices.len(),
        corpus.labels(),
        corpus.classes().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Record;

    fn text_corpus(docs: &[&str]) -> RawCorpus {
        let records = docs
            .iter()
            .enumerate()
            .map(|(i, t)| Record {
                id: format!("d{i}"),
                content: Content::Text(t.to_string()),
                label: if i % 2 == 0 { "pos" } else { "neg" }.into(),
            })
            .collect();
        RawCorpus::new(records).unwrap()
    }

    fn vec_corpus(vs: &[Vec<f64>]) -> RawCorpus {
        let records = vs
            .iter()
            .enumerate()
            .map(|(i, v)| Record {
                id: format!("v{i}"),
                content: Content::Vector(v.clone()),
                label: if i % 2 == 0 { "pos" } else { "neg" }.into(),
            })
            .collect();
        RawCorpus::new(records).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn bow_two_docs() {
        let d = build_bow(&text_corpus(&["a b", "b c"]), &Tokenizer::default()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(d.dim(), 3);
        assert!(close(d.row(0), &[s, s, 0.0]));
        assert!(close(d.row(1), &[0.0, s, s]));
    }

    #[test]
    fn bow_repeated_token_direction() {
        let d = build_bow(&text_corpus(&["a a a", "b"]), &Tokenizer::default()).unwrap();
        assert_eq!(d.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn bow_hand_tallied_counts() {
        // vocab by first occurrence: the, cat, sat, on, mat, dog, ran
        let docs = [
            "The cat sat",
            "on the mat, the cat!",
            "dog ran",
            "The dog sat on the dog",
        ];
        let tally: [[f64; 7]; 4] = [
            [1., 1., 1., 0., 0., 0., 0.],
            [2., 1., 0., 1., 1., 0., 0.],
            [0., 0., 0., 0., 0., 1., 1.],
            [2., 0., 1., 1., 0., 2., 0.],
        ];
        let d = build_bow(&text_corpus(&docs), &Tokenizer::default()).unwrap();
        assert_eq!(d.dim(), 7);
        for (i, counts) in tally.iter().enumerate() {
            let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
            let expect: Vec<f64> = counts.iter().map(|c| c / norm).collect();
            assert!(close(d.row(i), &expect), "row {i}: {:?}", d.row(i));
        }
    }

    #[test]
    fn bow_rejects_empty_document() {
        let err = build_bow(&text_corpus(&["a", "?!"]), &Tokenizer::default()).unwrap_err();
        assert!(err.to_string().contains("`d1`"), "{err}");
    }

    fn table() -> VectorTable {
        VectorTable::from_reader("a 1 0\nb 0 1\nc 3 4\n".as_bytes()).unwrap()
    }

    #[test]
    fn mean_static_examples() {
        let t = table();
        let d =
            build_mean_static(&text_corpus(&["a b", "a a"]), &t, &Tokenizer::default()).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!(close(d.row(0), &[s, s]));
        assert_eq!(d.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn mean_static_skips_oov() {
        let t = table();
        let d = build_mean_static(
            &text_corpus(&["a zz c qq c", "b"]),
            &t,
            &Tokenizer::default(),
        )
        .unwrap();
        // oracle: mean of a, c, c = (7/3, 8/3)
        let m: [f64; 2] = [7.0 / 3.0, 8.0 / 3.0];
        let n = (m[0] * m[0] + m[1] * m[1]).sqrt();
        assert!(close(d.row(0), &[m[0] / n, m[1] / n]));
    }

    #[test]
    fn mean_static_rejects_all_oov() {
        let err = build_mean_static(
            &text_corpus(&["a", "zz qq"]),
            &table(),
            &Tokenizer::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("`d1`"));
    }

    #[test]
    fn vector_table_dimension_must_be_uniform() {
        assert!(VectorTable::from_reader("a 1 0\nb 1\n".as_bytes()).is_err());
        assert!(VectorTable::from_reader("a 1 x\n".as_bytes()).is_err());
    }

    #[test]
    fn dense_examples() {
        let d = build_dense(&vec_corpus(&[vec![3.0, 4.0], vec![0.0, 1.0]])).unwrap();
        assert!(close(d.row(0), &[0.6, 0.8]));
        assert_eq!(d.row(1), &[0.0, 1.0]);
        assert!(build_dense(&vec_corpus(&[vec![0.0, 0.0], vec![1.0, 0.0]])).is_err());
        assert!(build_dense(&vec_corpus(&[vec![1.0], vec![1.0, 0.0]])).is_err());
    }

    #[test]
    fn coordinates_projection() {
        let d = build_coordinates(
            &vec_corpus(&[vec![3.0, 9.0, 4.0], vec![1.0, 0.0, 0.0]]),
            &[0, 2],
        )
        .unwrap();
        assert!(close(d.row(0), &[0.6, 0.8]));
        assert!(build_coordinates(&vec_corpus(&[vec![1.0], vec![2.0]]), &[1]).is_err());
    }
}
