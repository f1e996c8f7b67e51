use indexmap::IndexMap;

/// Language tag used for values with no language.
pub const NO_LANGUAGE: &str = "none";

/// A JSON-LD language map: language tag to one or more strings.
///
/// Insertion order is kept for output; equality ignores order. A map built
/// in code may be empty; validation reports that.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LanguageMap(IndexMap<String, Vec<String>>);

impl LanguageMap {
    pub fn new() -> Self {
        LanguageMap(IndexMap::new())
    }

    /// A map with a single value under `lang`.
    pub fn single(lang: &str, value: impl Into<String>) -> Self {
        LanguageMap::new().with(lang, value)
    }

    /// A map with a single value tagged `none`.
    pub fn none(value: impl Into<String>) -> Self {
        LanguageMap::single(NO_LANGUAGE, value)
    }

    /// Appends `value` to the list for `lang`.
    pub fn with(mut self, lang: &str, value: impl Into<String>) -> Self {
        self.push(lang, value);
        self
    }

    pub fn push(&mut self, lang: &str, value: impl Into<String>) {
        self.0.entry(lang.to_string()).or_default().push(value.into());
    }

    pub fn insert(&mut self, lang: &str, values: Vec<String>) {
        self.0.insert(lang.to_string(), values);
    }

    pub fn get(&self, lang: &str) -> Option<&[String]> {
        self.0.get(lang).map(Vec::as_slice)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// At least one language, and no language with an empty list.
    pub fn is_well_formed(&self) -> bool {
        !self.0.is_empty() && self.0.values().all(|v| !v.is_empty())
    }

    /// First value, preferring `lang`, then `none`, then anything.
    pub fn first_value(&self, lang: &str) -> Option<&str> {
        self.get(lang)
            .and_then(|v| v.first())
            .or_else(|| self.get(NO_LANGUAGE).and_then(|v| v.first()))
            .or_else(|| self.0.values().find_map(|v| v.first()))
            .map(String::as_str)
    }
}

impl<'a> FromIterator<(&'a str, &'a str)> for LanguageMap {
    fn from_iter<I: IntoIterator<Item = (&'a str, &'a str)>>(iter: I) -> Self {
        let mut map = LanguageMap::new();
        for (lang, value) in iter {
            map.push(lang, value);
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_ignores_order() {
        let a: LanguageMap = [("de", "Haus"), ("fr", "maison")].into_iter().collect();
        let b: LanguageMap = [("fr", "maison"), ("de", "Haus")].into_iter().collect();
        assert_eq!(a, b);
        assert_eq!(a.languages().collect::<Vec<_>>(), ["de", "fr"]);
    }

    #[test]
    fn well_formedness() {
        assert!(!LanguageMap::new().is_well_formed());
        let mut m = LanguageMap::none("x");
        assert!(m.is_well_formed());
        m.insert("en", vec![]);
        assert!(!m.is_well_formed());
    }

    #[test]
    fn first_value_fallbacks() {
        let m = LanguageMap::single("de", "Haus").with("en", "house");
        assert_eq!(m.first_value("en"), Some("house"));
        assert_eq!(m.first_value("it"), Some("Haus"));
    }
}
