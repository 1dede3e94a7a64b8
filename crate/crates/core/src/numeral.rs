//! Numeral normalization and rendering for EN, HI, ZH and ES.
//!
//! Recognized forms: ASCII, Devanagari and full-width digits with the
//! locale's grouping separator (EN/ZH `1,234`, ES `1.234`, HI `1,234` or the
//! lakh form `12,34,567`), Chinese numerals with 万/亿 groupings including
//! mixed forms such as `3万`, and spelled-out numbers 0–20.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lang::Lang;

const NUMBER_WORDS: &str = include_str!("../data/number_words.tsv");

const CN_DIGITS: [char; 10] = ['零', '一', '二', '三', '四', '五', '六', '七', '八', '九'];
const DEVANAGARI_ZERO: u32 = 0x0966;

/// Resolves `token` to a non-negative integer, or `None` if it is not a
/// numeral in `lang`.
pub fn normalize_numeral(token: &str, lang: Lang) -> Option<u64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    if t.chars().all(|c| ascii_digit(c).is_some() || is_group_sep(c)) {
        return parse_grouped(&map_digits(t), lang);
    }
    if lang == Lang::Zh {
        if let Some(v) = parse_chinese(t) {
            return Some(v);
        }
    }
    word_value(t, lang).or_else(|| word_value(t, Lang::En))
}

/// True if `c` may start or continue a numeral token in `lang`.
pub fn is_numeral_char(c: char, lang: Lang) -> bool {
    ascii_digit(c).is_some() || (lang == Lang::Zh && is_chinese_numeral_char(c))
}

pub(crate) fn is_chinese_numeral_char(c: char) -> bool {
    cn_digit(c).is_some() || cn_unit(c).is_some() || matches!(c, '万' | '萬' | '亿' | '億')
}

/// Parses a decimal number with any supported digit script. Integers go
/// through [`normalize_numeral`] so grouped and Chinese forms work too.
pub fn parse_number(token: &str, lang: Lang) -> Option<f64> {
    if let Some(n) = normalize_numeral(token, lang) {
        return Some(n as f64);
    }
    let mapped = map_digits(token.trim());
    let cleaned: String = mapped.chars().filter(|c| *c != ',').collect();
    if cleaned.is_empty()
        || !cleaned
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+'))
        || !cleaned.chars().any(|c| c.is_ascii_digit())
    {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|f| f.is_finite())
}

/// Renders `n` the way the scenario generator writes numbers in `lang`.
pub fn render_integer(n: u64, lang: Lang) -> String {
    match lang {
        Lang::En => group_western(n, ','),
        Lang::Es => group_western(n, '.'),
        Lang::Hi => group_indian(n)
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) => char::from_u32(DEVANAGARI_ZERO + d).unwrap_or(c),
                None => c,
            })
            .collect(),
        Lang::Zh => render_chinese(n),
    }
}

fn ascii_digit(c: char) -> Option<u32> {
    match c {
        '0'..='9' => Some(c as u32 - '0' as u32),
        '\u{0966}'..='\u{096F}' => Some(c as u32 - DEVANAGARI_ZERO),
        '\u{FF10}'..='\u{FF19}' => Some(c as u32 - 0xFF10),
        _ => None,
    }
}

fn is_group_sep(c: char) -> bool {
    matches!(c, ',' | '.' | ' ' | '\u{00A0}' | '\u{202F}' | '，')
}

fn map_digits(s: &str) -> String {
    s.chars()
        .map(|c| match ascii_digit(c) {
            Some(d) => char::from_digit(d, 10).unwrap_or(c),
            None if c == '，' => ',',
            None => c,
        })
        .collect()
}

fn parse_grouped(s: &str, lang: Lang) -> Option<u64> {
    let seps: &[char] = match lang {
        Lang::Es => &['.', ' ', '\u{00A0}', '\u{202F}'],
        _ => &[','],
    };
    if s.chars().all(|c| c.is_ascii_digit()) {
        return s.parse().ok();
    }
    let sep = s.chars().find(|c| !c.is_ascii_digit())?;
    if !seps.contains(&sep) {
        return None;
    }
    let groups: Vec<&str> = s.split(sep).collect();
    if groups.iter().any(|g| g.is_empty() || !g.chars().all(|c| c.is_ascii_digit())) {
        return None;
    }
    let western = groups[0].len() <= 3 && groups[1..].iter().all(|g| g.len() == 3);
    let indian = lang == Lang::Hi
        && groups.len() >= 2
        && groups[0].len() <= 2
        && groups[groups.len() - 1].len() == 3
        && groups[1..groups.len() - 1].iter().all(|g| g.len() == 2);
    if !(western || indian) {
        return None;
    }
    let digits: String = groups.concat();
    digits.parse().ok()
}

fn word_value(t: &str, lang: Lang) -> Option<u64> {
    let lower = t.to_lowercase();
    NUMBER_WORDS
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let mut parts = l.split('\t');
            Some((parts.next()?, parts.next()?, parts.next()?))
        })
        .find(|(code, word, _)| *code == lang.code() && *word == lower)
        .and_then(|(_, _, value)| value.parse().ok())
}

fn cn_digit(c: char) -> Option<u128> {
    match c {
        '零' | '〇' => Some(0),
        '一' => Some(1),
        '二' | '两' => Some(2),
        '三' => Some(3),
        '四' => Some(4),
        '五' => Some(5),
        '六' => Some(6),
        '七' => Some(7),
        '八' => Some(8),
        '九' => Some(9),
        _ => None,
    }
}

fn cn_unit(c: char) -> Option<u128> {
    match c {
        '十' | '拾' => Some(10),
        '百' | '佰' => Some(100),
        '千' | '仟' => Some(1000),
        _ => None,
    }
}

/// Pending number in the Chinese parser: `value / 10^scale`.
#[derive(Clone, Copy)]
struct Pending {
    value: u128,
    scale: u32,
}

fn parse_chinese(s: &str) -> Option<u64> {
    let chars: Vec<char> = s.chars().collect();
    let mut total: u128 = 0;
    let mut section: u128 = 0;
    let mut pending: Option<Pending> = None;
    // A fractional coefficient ("1.5万") must end the numeral.
    let mut closed = false;
    let mut i = 0;
    while i < chars.len() {
        if closed {
            return None;
        }
        let c = chars[i];
        if let Some(d) = cn_digit(c) {
            if matches!(pending, Some(p) if p.value != 0) {
                return None;
            }
            pending = Some(Pending { value: d, scale: 0 });
            i += 1;
            continue;
        }
        if ascii_digit(c).is_some() {
            if pending.is_some() {
                return None;
            }
            let (p, used) = read_decimal_run(&chars[i..])?;
            pending = Some(p);
            i += used;
            continue;
        }
        if let Some(unit) = cn_unit(c) {
            let n = match pending.take() {
                Some(Pending { value, scale: 0 }) => value,
                Some(_) => return None,
                None if section == 0 && total == 0 => 1,
                None => return None,
            };
            section = section.checked_add(n.checked_mul(unit)?)?;
        } else if matches!(c, '万' | '萬' | '亿' | '億') {
            let mult: u128 = if matches!(c, '万' | '萬') { 10_000 } else { 100_000_000 };
            let p = pending.take().unwrap_or(Pending { value: 0, scale: 0 });
            closed = p.scale > 0;
            let pow = 10u128.checked_pow(p.scale)?;
            let base = if mult == 10_000 { section } else { total.checked_add(section)? };
            let scaled = base.checked_mul(pow)?.checked_add(p.value)?.checked_mul(mult)?;
            if scaled % pow != 0 || (scaled == 0 && base == 0 && p.value == 0) {
                return None;
            }
            if mult == 10_000 {
                total = total.checked_add(scaled / pow)?;
            } else {
                total = scaled / pow;
            }
            section = 0;
        } else {
            return None;
        }
        i += 1;
    }
    let tail = match pending {
        Some(Pending { value, scale: 0 }) => value,
        Some(_) => return None,
        None => 0,
    };
    let v = total.checked_add(section)?.checked_add(tail)?;
    u64::try_from(v).ok()
}

fn read_decimal_run(chars: &[char]) -> Option<(Pending, usize)> {
    let mut value: u128 = 0;
    let mut scale = 0u32;
    let mut seen_dot = false;
    let mut used = 0;
    for &c in chars {
        if let Some(d) = ascii_digit(c) {
            value = value.checked_mul(10)?.checked_add(d as u128)?;
            if seen_dot {
                scale += 1;
            }
        } else if c == '.' && !seen_dot {
            seen_dot = true;
        } else {
            break;
        }
        used += 1;
    }
    if seen_dot && scale == 0 {
        return None;
    }
    Some((Pending { value, scale }, used))
}

fn group_western(n: u64, sep: char) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(sep);
        }
        out.push(c);
    }
    out
}

fn group_indian(n: u64) -> String {
    let digits = n.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let (head, last3) = digits.split_at(digits.len() - 3);
    let mut out = String::new();
    for (i, c) in head.chars().enumerate() {
        if i > 0 && (head.len() - i) % 2 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out.push(',');
    out.push_str(last3);
    out
}

fn render_chinese(n: u64) -> String {
    if n == 0 {
        return "零".into();
    }
    let yi = n / 100_000_000;
    let wan = (n / 10_000) % 10_000;
    let rest = n % 10_000;
    let mut out = String::new();
    if yi > 0 {
        // Values of 10^12 and above would need 万亿; render the 亿 count
        // recursively so the parser's grouping still inverts it.
        out.push_str(&render_chinese_group(yi));
        out.push('亿');
    }
    if wan > 0 {
        if yi > 0 && wan < 1000 {
            out.push('零');
        }
        out.push_str(&render_section(wan as u32, out.is_empty()));
        out.push('万');
    }
    if rest > 0 {
        if (yi > 0 || wan > 0) && rest < 1000 {
            out.push('零');
        }
        out.push_str(&render_section(rest as u32, out.is_empty()));
    }
    out
}

fn render_chinese_group(n: u64) -> String {
    if n < 10_000 {
        render_section(n as u32, true)
    } else {
        render_chinese(n)
    }
}

/// Renders 1..=9999. `leading` drops the 一 in 一十 at the very start.
fn render_section(n: u32, leading: bool) -> String {
    const UNITS: [&str; 4] = ["千", "百", "十", ""];
    let digits = [n / 1000, (n / 100) % 10, (n / 10) % 10, n % 10];
    let mut out = String::new();
    let mut started = false;
    let mut zero_pending = false;
    for (d, unit) in digits.iter().zip(UNITS) {
        if *d == 0 {
            if started {
                zero_pending = true;
            }
            continue;
        }
        if zero_pending {
            out.push('零');
            zero_pending = false;
        }
        if !(*d == 1 && unit == "十" && !started && leading) {
            out.push(CN_DIGITS[*d as usize]);
        }
        out.push_str(unit);
        started = true;
    }
    out
}
