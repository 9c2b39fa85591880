//! Spanish Snowball stemmer.
//!
//! A direct port of the Snowball `spanish` algorithm: RV/R1/R2 region marking,
//! attached-pronoun removal, standard / y-verb / verb suffix steps, residual
//! suffix removal and final acute-accent stripping. Operates on `char`s so
//! that accented vowels count as one position.

const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u', 'á', 'é', 'í', 'ó', 'ú', 'ü'];

fn is_vowel(c: char) -> bool {
    VOWELS.contains(&c)
}

struct Regions {
    rv: usize,
    r1: usize,
    r2: usize,
}

fn position_after(w: &[char], from: usize, pred: impl Fn(char) -> bool) -> Option<usize> {
    (from..w.len()).find(|&i| pred(w[i])).map(|i| i + 1)
}

fn mark_regions(w: &[char]) -> Regions {
    let n = w.len();
    let rv = if n < 2 {
        None
    } else if is_vowel(w[0]) {
        if !is_vowel(w[1]) {
            position_after(w, 2, is_vowel)
        } else {
            position_after(w, 2, |c| !is_vowel(c))
        }
    } else if !is_vowel(w[1]) {
        position_after(w, 2, is_vowel)
    } else if n >= 3 {
        Some(3)
    } else {
        None
    };
    let r_after = |from: usize| {
        position_after(w, from, is_vowel)
            .and_then(|i| position_after(w, i, |c| !is_vowel(c)))
            .unwrap_or(n)
    };
    let r1 = r_after(0);
    let r2 = if r1 < n { r_after(r1) } else { n };
    Regions {
        rv: rv.unwrap_or(n),
        r1,
        r2,
    }
}

fn ends_with(w: &[char], suffix: &str) -> bool {
    let s: Vec<char> = suffix.chars().collect();
    w.len() >= s.len() && w[w.len() - s.len()..] == s[..]
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Longest suffix of `w` among `list`, optionally restricted to start at or
/// after `min_start`.
fn longest_suffix<'a>(w: &[char], list: &[&'a str], min_start: usize) -> Option<&'a str> {
    list.iter()
        .copied()
        .filter(|s| ends_with(w, s) && w.len() - char_len(s) >= min_start)
        .max_by_key(|s| char_len(s))
}

fn replace_tail(w: &mut Vec<char>, start: usize, with: &str) {
    w.truncate(start);
    w.extend(with.chars());
}

const PRONOUNS: &[&str] = &[
    "me", "se", "sela", "selo", "selas", "selos", "la", "le", "lo", "las", "les", "los", "nos",
];

const PRONOUN_HOSTS: &[&str] = &[
    "iéndo", "ándo", "ár", "ér", "ír", "ando", "iendo", "ar", "er", "ir", "yendo",
];

fn attached_pronoun(w: &mut Vec<char>, r: &Regions) -> bool {
    let Some(pron) = longest_suffix(w, PRONOUNS, 0) else {
        return false;
    };
    let base_end = w.len() - char_len(pron);
    let Some(host) = longest_suffix(&w[..base_end], PRONOUN_HOSTS, 0) else {
        return false;
    };
    let start = base_end - char_len(host);
    if start < r.rv {
        return false;
    }
    match host {
        "iéndo" => replace_tail(w, start, "iendo"),
        "ándo" => replace_tail(w, start, "ando"),
        "ár" => replace_tail(w, start, "ar"),
        "ér" => replace_tail(w, start, "er"),
        "ír" => replace_tail(w, start, "ir"),
        "yendo" => {
            if start == 0 || w[start - 1] != 'u' {
                return false;
            }
            w.truncate(base_end);
        }
        _ => w.truncate(base_end),
    }
    true
}

#[derive(Clone, Copy)]
enum Standard {
    DeleteR2,
    DeleteR2ThenIc,
    Logia,
    Ucion,
    Encia,
    Amente,
    Mente,
    Idad,
    Ivo,
}

const STANDARD: &[(&str, Standard)] = &[
    ("anza", Standard::DeleteR2),
    ("anzas", Standard::DeleteR2),
    ("ico", Standard::DeleteR2),
    ("ica", Standard::DeleteR2),
    ("icos", Standard::DeleteR2),
    ("icas", Standard::DeleteR2),
    ("ismo", Standard::DeleteR2),
    ("ismos", Standard::DeleteR2),
    ("able", Standard::DeleteR2),
    ("ables", Standard::DeleteR2),
    ("ible", Standard::DeleteR2),
    ("ibles", Standard::DeleteR2),
    ("ista", Standard::DeleteR2),
    ("istas", Standard::DeleteR2),
    ("oso", Standard::DeleteR2),
    ("osa", Standard::DeleteR2),
    ("osos", Standard::DeleteR2),
    ("osas", Standard::DeleteR2),
    ("amiento", Standard::DeleteR2),
    ("amientos", Standard::DeleteR2),
    ("imiento", Standard::DeleteR2),
    ("imientos", Standard::DeleteR2),
    ("adora", Standard::DeleteR2ThenIc),
    ("ador", Standard::DeleteR2ThenIc),
    ("ación", Standard::DeleteR2ThenIc),
    ("adoras", Standard::DeleteR2ThenIc),
    ("adores", Standard::DeleteR2ThenIc),
    ("aciones", Standard::DeleteR2ThenIc),
    ("ante", Standard::DeleteR2ThenIc),
    ("antes", Standard::DeleteR2ThenIc),
    ("ancia", Standard::DeleteR2ThenIc),
    ("ancias", Standard::DeleteR2ThenIc),
    ("logía", Standard::Logia),
    ("logías", Standard::Logia),
    ("ución", Standard::Ucion),
    ("uciones", Standard::Ucion),
    ("encia", Standard::Encia),
    ("encias", Standard::Encia),
    ("amente", Standard::Amente),
    ("mente", Standard::Mente),
    ("idad", Standard::Idad),
    ("idades", Standard::Idad),
    ("iva", Standard::Ivo),
    ("ivo", Standard::Ivo),
    ("ivas", Standard::Ivo),
    ("ivos", Standard::Ivo),
];

/// Deletes `suffix` if present and starting inside R2.
fn delete_in_r2(w: &mut Vec<char>, suffix: &str, r: &Regions) -> bool {
    if ends_with(w, suffix) {
        let start = w.len() - char_len(suffix);
        if start >= r.r2 {
            w.truncate(start);
            return true;
        }
    }
    false
}

fn standard_suffix(w: &mut Vec<char>, r: &Regions) -> bool {
    let Some((suffix, kind)) = STANDARD
        .iter()
        .filter(|(s, _)| ends_with(w, s))
        .max_by_key(|(s, _)| char_len(s))
        .copied()
    else {
        return false;
    };
    let start = w.len() - char_len(suffix);
    let in_r2 = start >= r.r2;
    match kind {
        Standard::DeleteR2 => {
            if !in_r2 {
                return false;
            }
            w.truncate(start);
        }
        Standard::DeleteR2ThenIc => {
            if !in_r2 {
                return false;
            }
            w.truncate(start);
            delete_in_r2(w, "ic", r);
        }
        Standard::Logia => {
            if !in_r2 {
                return false;
            }
            replace_tail(w, start, "log");
        }
        Standard::Ucion => {
            if !in_r2 {
                return false;
            }
            replace_tail(w, start, "u");
        }
        Standard::Encia => {
            if !in_r2 {
                return false;
            }
            replace_tail(w, start, "ente");
        }
        Standard::Amente => {
            if start < r.r1 {
                return false;
            }
            w.truncate(start);
            if let Some(s) = longest_suffix(w, &["iv", "os", "ic", "ad"], 0) {
                if delete_in_r2(w, s, r) && s == "iv" {
                    delete_in_r2(w, "at", r);
                }
            }
        }
        Standard::Mente => {
            if !in_r2 {
                return false;
            }
            w.truncate(start);
            if let Some(s) = longest_suffix(w, &["ante", "able", "ible"], 0) {
                delete_in_r2(w, s, r);
            }
        }
        Standard::Idad => {
            if !in_r2 {
                return false;
            }
            w.truncate(start);
            if let Some(s) = longest_suffix(w, &["abil", "ic", "iv"], 0) {
                delete_in_r2(w, s, r);
            }
        }
        Standard::Ivo => {
            if !in_r2 {
                return false;
            }
            w.truncate(start);
            delete_in_r2(w, "at", r);
        }
    }
    true
}

const Y_VERB: &[&str] = &[
    "ya", "ye", "yan", "yen", "yeron", "yendo", "yo", "yó", "yas", "yes", "yais", "yamos",
];

fn y_verb_suffix(w: &mut Vec<char>, r: &Regions) -> bool {
    let Some(s) = longest_suffix(w, Y_VERB, r.rv) else {
        return false;
    };
    let start = w.len() - char_len(s);
    // the preceding u need not lie in RV
    if start == 0 || w[start - 1] != 'u' {
        return false;
    }
    w.truncate(start);
    true
}

const VERB_GU: &[&str] = &["en", "es", "éis", "emos"];

const VERB: &[&str] = &[
    "arían", "arías", "arán", "arás", "aríais", "aría", "aréis", "aríamos", "aremos", "ará", "aré",
    "erían", "erías", "erán", "erás", "eríais", "ería", "eréis", "eríamos", "eremos", "erá", "eré",
    "irían", "irías", "irán", "irás", "iríais", "iría", "iréis", "iríamos", "iremos", "irá", "iré",
    "aba", "ada", "ida", "ía", "ara", "iera", "ad", "ed", "id", "ase", "iese", "aste", "iste", "an",
    "aban", "ían", "aran", "ieran", "asen", "iesen", "aron", "ieron", "ado", "ido", "ando",
    "iendo", "ió", "ar", "er", "ir", "as", "abas", "adas", "idas", "ías", "aras", "ieras", "ases",
    "ieses", "ís", "áis", "abais", "íais", "arais", "ierais", "aseis", "ieseis", "asteis",
    "isteis", "ados", "idos", "amos", "ábamos", "íamos", "imos", "áramos", "iéramos", "iésemos",
    "ásemos",
];

fn verb_suffix(w: &mut Vec<char>, r: &Regions) -> bool {
    let gu = longest_suffix(w, VERB_GU, r.rv);
    let plain = longest_suffix(w, VERB, r.rv);
    let (s, is_gu) = match (gu, plain) {
        (None, None) => return false,
        (Some(g), None) => (g, true),
        (None, Some(p)) => (p, false),
        (Some(g), Some(p)) => {
            if char_len(g) >= char_len(p) {
                (g, true)
            } else {
                (p, false)
            }
        }
    };
    let mut start = w.len() - char_len(s);
    if is_gu && start >= 2 && w[start - 1] == 'u' && w[start - 2] == 'g' {
        start -= 1;
    }
    w.truncate(start);
    true
}

fn residual_suffix(w: &mut Vec<char>, r: &Regions) {
    let Some(s) = longest_suffix(w, &["os", "a", "o", "á", "í", "ó", "e", "é"], 0) else {
        return;
    };
    let start = w.len() - char_len(s);
    if start < r.rv {
        return;
    }
    w.truncate(start);
    if (s == "e" || s == "é")
        && start >= 2
        && w[start - 1] == 'u'
        && w[start - 2] == 'g'
        && start > r.rv
    {
        w.truncate(start - 1);
    }
}

fn strip_acute(c: char) -> char {
    match c {
        'á' => 'a',
        'é' => 'e',
        'í' => 'i',
        'ó' => 'o',
        'ú' => 'u',
        other => other,
    }
}

/// Stems one lower-case Spanish word.
pub fn stem(word: &str) -> String {
    let mut w: Vec<char> = word.chars().collect();
    let r = mark_regions(&w);
    attached_pronoun(&mut w, &r);
    let _ = standard_suffix(&mut w, &r) || y_verb_suffix(&mut w, &r) || verb_suffix(&mut w, &r);
    residual_suffix(&mut w, &r);
    w.into_iter().map(strip_acute).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert_eq!(stem("amores"), "amor");
        assert_eq!(stem("cantando"), "cant");
        assert_eq!(stem("x"), "x");
        assert_eq!(stem(""), "");
    }

    #[test]
    fn regions_follow_the_definitions() {
        // macho: consonant-vowel start, RV after third letter
        let r = mark_regions(&"macho".chars().collect::<Vec<_>>());
        assert_eq!(r.rv, 3);
        // oliva: vowel-consonant start, RV after next vowel
        let r = mark_regions(&"oliva".chars().collect::<Vec<_>>());
        assert_eq!(r.rv, 3);
        // trabajo: two consonants, RV after next vowel
        let r = mark_regions(&"trabajo".chars().collect::<Vec<_>>());
        assert_eq!(r.rv, 3);
        // áureo: two vowels, RV after next consonant
        let r = mark_regions(&"áureo".chars().collect::<Vec<_>>());
        assert_eq!(r.rv, 3);
        let r = mark_regions(&"beautiful".chars().collect::<Vec<_>>());
        assert_eq!((r.r1, r.r2), (5, 7));
    }

    #[test]
    fn pronoun_and_gu_rules() {
        assert_eq!(stem("diciéndole"), stem("diciendo"));
        assert_eq!(stem("siguen"), "sig");
        assert_eq!(stem("averigüe"), "averigü");
    }
}
