use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};

fn norm(v: ArrayView1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity, `-inf` when either vector is zero.
pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return f64::NEG_INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>() / (na * nb)
}

/// The `k` rows most cosine-similar to row `word_id`, most similar first.
/// The word itself and the unknown-word row are never returned; equal
/// similarities are ordered by id.
pub fn knn_candidates(embeddings: ArrayView2<f64>, word_id: u32, k: usize, unk_id: u32) -> Result<Vec<u32>> {
    let rows = embeddings.nrows();
    if word_id as usize >= rows {
        return Err(Error::OutOfRange {
            what: "word id",
            value: word_id as f64,
        });
    }
    let excluded = if word_id == unk_id { 1 } else { 2 };
    if k == 0 || k + excluded > rows {
        return Err(Error::InvalidArgument(format!(
            "k = {k} needs at least {} embedding rows, found {rows}",
            k + excluded
        )));
    }
    let query = embeddings.row(word_id as usize);
    let mut scored: Vec<(f64, u32)> = (0..rows as u32)
        .filter(|&j| j != word_id && j != unk_id)
        .map(|j| (cosine(query, embeddings.row(j as usize)), j))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(k).map(|(_, j)| j).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn duplicate_row_is_first_neighbour() {
        let e = array![[0.0, 0.0], [1.0, 2.0], [0.5, 0.1], [1.0, 2.0], [-1.0, 0.3]];
        assert_eq!(knn_candidates(e.view(), 1, 1, 0).unwrap(), vec![3]);
    }

    #[test]
    fn ties_go_to_lower_ids() {
        let mut e = Array2::zeros((6, 5));
        for i in 0..5 {
            e[[i + 1, i]] = 1.0;
        }
        assert_eq!(knn_candidates(e.view(), 3, 2, 0).unwrap(), vec![1, 2]);
    }

    #[test]
    fn zero_vectors_rank_last() {
        let e = array![[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [-1.0, 0.0]];
        assert_eq!(knn_candidates(e.view(), 1, 2, 0).unwrap(), vec![3, 2]);
    }

    #[test]
    fn k_too_large() {
        let e = Array2::<f64>::ones((3, 2));
        assert!(knn_candidates(e.view(), 1, 2, 0).is_err());
        assert!(knn_candidates(e.view(), 1, 0, 0).is_err());
        assert_eq!(knn_candidates(e.view(), 0, 2, 0).unwrap(), vec![1, 2]);
    }
}
