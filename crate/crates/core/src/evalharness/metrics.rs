use crate::{Error, Result};

/// Fraction of votes where `p >= 0.5` agrees with the label. A probability
/// of exactly one half counts as a yes.
pub fn accuracy(probabilities: &[f64], labels: &[bool]) -> Result<f64> {
    if probabilities.len() != labels.len() {
        return Err(Error::Shape {
            op: "accuracy",
            expected: vec![labels.len()],
            actual: vec![probabilities.len()],
        });
    }
    if labels.is_empty() {
        return Err(Error::Empty("accuracy over zero votes".into()));
    }
    Ok(count_correct(probabilities, labels) as f64 / labels.len() as f64)
}

pub(crate) fn count_correct(probabilities: &[f64], labels: &[bool]) -> usize {
    probabilities
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| (p >= 0.5) == y)
        .count()
}

/// Accuracy of always predicting yes: the yes fraction of `labels`.
pub fn guess_yes(labels: &[bool]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Empty("guess-yes over zero votes".into()));
    }
    Ok(labels.iter().filter(|&&y| y).count() as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(accuracy(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0.6, 0.4], &[true, true]).unwrap(), 0.5);
        assert_eq!(accuracy(&[0.5], &[true]).unwrap(), 1.0);
        assert_eq!(guess_yes(&[true, true, false, false]).unwrap(), 0.5);
    }

    #[test]
    fn errors() {
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[0.5], &[true, false]).is_err());
        assert!(guess_yes(&[]).is_err());
    }
}
