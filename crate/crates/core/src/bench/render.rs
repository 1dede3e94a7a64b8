//! Hand-written sentence templates in the four benchmark languages.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lang::Lang;
use crate::numeral::render_integer;

/// One sentence kind with its slot values. Entity names stay in Latin
/// script in every language; counts go through the locale's numerals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phrase", rename_all = "snake_case")]
pub enum Phrase {
    EmailCount { n: u64 },
    EmailSubject { sender: String, subject: String },
    EmailDate { date: String },
    EmailMood { sender: String, subject: String },
    EmailUrgent { sender: String, subject: String },
    EmailNone,
    MeetingCount { n: u64 },
    MeetingFirst { title: String, start: String },
    MeetingPlace { location: String },
    MeetingBusy { title: String },
    MeetingPriority { title: String },
    StockClose { symbol: String, close: String },
    StockChange { symbol: String, pct: String },
    StockCompare { a: String, b: String, a_close: String, b_close: String, higher: bool },
    StockOutlook { symbol: String },
    StockRating { symbol: String },
    WebTitle { title: String },
    WebPublisher { publisher: String },
    WebCite { publisher: String, url: String },
    WebFollowUp { publisher: String },
    WebConfirmed { publisher: String },
    SourceClaim { publisher: String, url: String },
    NothingFound,
    Speculation { which: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub asserts: Option<BTreeMap<String, String>>,
    pub premises: Option<Vec<String>>,
}

fn q(lang: Lang, s: &str) -> String {
    match lang {
        Lang::Zh => format!("“{s}”"),
        _ => format!("\"{s}\""),
    }
}

fn pick(lang: Lang, en: String, es: String, hi: String, zh: String) -> String {
    match lang {
        Lang::En => en,
        Lang::Es => es,
        Lang::Hi => hi,
        Lang::Zh => zh,
    }
}

fn asserts(pairs: &[(&str, &str)]) -> Option<BTreeMap<String, String>> {
    Some(pairs.iter().map(|(k, v)| ((*k).into(), (*v).into())).collect())
}

fn premises(items: &[&str]) -> Option<Vec<String>> {
    Some(items.iter().map(|s| (*s).into()).collect())
}

impl Phrase {
    pub fn render(&self, lang: Lang) -> Rendered {
        let mut a = None;
        let mut p = None;
        let text = match self {
            Phrase::EmailCount { n } => {
                let k = render_integer(*n, lang);
                a = asserts(&[("count", &k)]);
                pick(
                    lang,
                    format!("You have {k} emails in your inbox today."),
                    format!("Tienes {k} correos en tu bandeja hoy."),
                    format!("आज आपके इनबॉक्स में {k} ईमेल हैं।"),
                    format!("你今天收件箱里有{k}封邮件。"),
                )
            }
            Phrase::EmailSubject { sender, subject } => {
                a = asserts(&[("sender", sender), ("subject", subject)]);
                let j = q(lang, subject);
                pick(
                    lang,
                    format!("The latest is from {sender} with the subject {j}."),
                    format!("El más reciente es de {sender} con el asunto {j}."),
                    format!("सबसे नया ईमेल {sender} का है, विषय {j}।"),
                    format!("最新一封来自{sender}，主题是{j}。"),
                )
            }
            Phrase::EmailDate { date } => {
                a = asserts(&[("date", date)]);
                pick(
                    lang,
                    format!("It arrived on {date}."),
                    format!("Llegó el {date}."),
                    format!("यह {date} को आया।"),
                    format!("它于{date}送达。"),
                )
            }
            Phrase::EmailMood { sender, subject } => {
                p = premises(&[sender, subject]);
                let j = q(lang, subject);
                pick(
                    lang,
                    format!("{sender} probably expects a reply about {j}."),
                    format!("{sender} probablemente espera una respuesta sobre {j}."),
                    format!("{sender} शायद {j} पर जवाब की उम्मीद कर रहे हैं।"),
                    format!("{sender}可能在等你回复{j}。"),
                )
            }
            Phrase::EmailUrgent { sender, subject } => {
                a = asserts(&[("sender", sender), ("urgency", "high")]);
                let j = q(lang, subject);
                pick(
                    lang,
                    format!("{sender} needs an urgent reply about {j}."),
                    format!("{sender} necesita una respuesta urgente sobre {j}."),
                    format!("{sender} को {j} पर तुरंत जवाब चाहिए।"),
                    format!("{sender}需要你尽快回复{j}。"),
                )
            }
            Phrase::EmailNone => pick(
                lang,
                "You have no new emails.".into(),
                "No tienes correos nuevos.".into(),
                "आपको कोई नया ईमेल नहीं मिला।".into(),
                "你没有新邮件。".into(),
            ),
            Phrase::MeetingCount { n } => {
                let k = render_integer(*n, lang);
                a = asserts(&[("count", &k)]);
                pick(
                    lang,
                    format!("You have {k} meetings today."),
                    format!("Tienes {k} reuniones hoy."),
                    format!("आज आपकी {k} मीटिंग हैं।"),
                    format!("你今天有{k}场会议。"),
                )
            }
            Phrase::MeetingFirst { title, start } => {
                a = asserts(&[("start", start), ("title", title)]);
                let t = q(lang, title);
                pick(
                    lang,
                    format!("The first one is {t} at {start}."),
                    format!("La primera es {t} a las {start}."),
                    format!("पहली मीटिंग {t} {start} पर है।"),
                    format!("第一场是{t}，时间{start}。"),
                )
            }
            Phrase::MeetingPlace { location } => {
                a = asserts(&[("location", location)]);
                pick(
                    lang,
                    format!("It takes place in {location}."),
                    format!("Será en {location}."),
                    format!("यह {location} में होगी।"),
                    format!("地点在{location}。"),
                )
            }
            Phrase::MeetingBusy { title } => {
                p = premises(&[title]);
                let t = q(lang, title);
                pick(
                    lang,
                    format!("Your morning looks busy because of {t}."),
                    format!("Tu mañana parece ocupada por {t}."),
                    format!("{t} की वजह से आपकी सुबह व्यस्त लगती है।"),
                    format!("因为{t}，你上午看起来很忙。"),
                )
            }
            Phrase::MeetingPriority { title } => {
                a = asserts(&[("priority", "high"), ("title", title)]);
                let t = q(lang, title);
                pick(
                    lang,
                    format!("{t} is your top-priority meeting."),
                    format!("{t} es tu reunión más importante."),
                    format!("{t} आपकी सबसे ज़रूरी मीटिंग है।"),
                    format!("{t}是你最重要的会议。"),
                )
            }
            Phrase::StockClose { symbol, close } => {
                a = asserts(&[("close", close), ("symbol", symbol)]);
                pick(
                    lang,
                    format!("{symbol} closed at {close}."),
                    format!("{symbol} cerró en {close}."),
                    format!("{symbol} {close} पर बंद हुआ।"),
                    format!("{symbol}收于{close}。"),
                )
            }
            Phrase::StockChange { symbol, pct } => {
                a = asserts(&[("change_pct", pct)]);
                pick(
                    lang,
                    format!("{symbol} moved {pct}% on the day."),
                    format!("{symbol} varió un {pct}% en el día."),
                    format!("{symbol} में दिन भर में {pct}% का बदलाव हुआ।"),
                    format!("{symbol}当日涨跌幅为{pct}%。"),
                )
            }
            Phrase::StockCompare {
                a: x,
                b: y,
                a_close,
                b_close,
                higher,
            } => {
                p = premises(&[a_close, b_close]);
                let (en, es, hi, zh) = if *higher {
                    ("higher than", "más alto que", "से अधिक", "高于")
                } else {
                    ("lower than", "más bajo que", "से कम", "低于")
                };
                pick(
                    lang,
                    format!("{x} closed {en} {y}."),
                    format!("{x} cerró {es} {y}."),
                    format!("{x} का भाव {y} {hi} रहा।"),
                    format!("{x}收盘价{zh}{y}。"),
                )
            }
            Phrase::StockOutlook { symbol } => {
                p = premises(&[symbol]);
                pick(
                    lang,
                    format!("{symbol} may keep attracting buyers."),
                    format!("{symbol} podría seguir atrayendo compradores."),
                    format!("{symbol} शायद खरीदारों को आकर्षित करता रहेगा।"),
                    format!("{symbol}可能会继续吸引买家。"),
                )
            }
            Phrase::StockRating { symbol } => {
                a = asserts(&[("rating", "strong buy"), ("symbol", symbol)]);
                pick(
                    lang,
                    format!("Analysts rate {symbol} a strong buy."),
                    format!("Los analistas califican {symbol} como compra fuerte."),
                    format!("विश्लेषक {symbol} को मज़बूत खरीद मानते हैं।"),
                    format!("分析师将{symbol}评为强力买入。"),
                )
            }
            Phrase::WebTitle { title } => {
                a = asserts(&[("title", title)]);
                let t = q(lang, title);
                pick(
                    lang,
                    format!("The article is titled {t}."),
                    format!("El artículo se titula {t}."),
                    format!("लेख का शीर्षक {t} है।"),
                    format!("文章标题是{t}。"),
                )
            }
            Phrase::WebPublisher { publisher } => {
                a = asserts(&[("publisher", publisher)]);
                pick(
                    lang,
                    format!("It was published by {publisher}."),
                    format!("Fue publicado por {publisher}."),
                    format!("इसे {publisher} ने प्रकाशित किया।"),
                    format!("发布方是{publisher}。"),
                )
            }
            Phrase::WebCite { publisher, url } => pick(
                lang,
                format!("According to {publisher}, the full story is at {url}."),
                format!("Según {publisher}, la noticia completa está en {url}."),
                format!("{publisher} के अनुसार पूरी खबर {url} पर है।"),
                format!("据{publisher}报道，全文见{url}。"),
            ),
            Phrase::WebFollowUp { publisher } => {
                p = premises(&[publisher]);
                pick(
                    lang,
                    format!("{publisher} will likely publish follow-ups."),
                    format!("{publisher} probablemente publicará seguimientos."),
                    format!("{publisher} शायद आगे और खबरें देगा।"),
                    format!("{publisher}可能会继续跟进报道。"),
                )
            }
            Phrase::WebConfirmed { publisher } => {
                a = asserts(&[("confirmation", "full"), ("publisher", publisher)]);
                pick(
                    lang,
                    format!("{publisher} has confirmed every detail of the story."),
                    format!("{publisher} ha confirmado cada detalle de la noticia."),
                    format!("{publisher} ने खबर के हर ब्योरे की पुष्टि की है।"),
                    format!("{publisher}已证实报道的全部细节。"),
                )
            }
            Phrase::SourceClaim { publisher, url } => pick(
                lang,
                format!("According to {publisher} ({url}), analysts expect further changes."),
                format!("Según {publisher} ({url}), los analistas esperan más cambios."),
                format!("{publisher} ({url}) के अनुसार विश्लेषक और बदलाव की उम्मीद करते हैं।"),
                format!("据{publisher}（{url}），分析人士预计还会有变化。"),
            ),
            Phrase::NothingFound => pick(
                lang,
                "No results were found.".into(),
                "No se encontraron resultados.".into(),
                "कोई परिणाम नहीं मिला।".into(),
                "没有找到任何结果。".into(),
            ),
            Phrase::Speculation { which } => {
                let (text, premise) = speculation(*which, lang);
                p = Some(vec![premise.into()]);
                text.into()
            }
        };
        Rendered {
            text,
            asserts: a,
            premises: p,
        }
    }
}

fn speculation(which: u8, lang: Lang) -> (&'static str, &'static str) {
    match (which % 3, lang) {
        (0, Lang::En) => ("This is probably more than last week.", "last week"),
        (0, Lang::Es) => ("Probablemente es más que la semana pasada.", "la semana pasada"),
        (0, Lang::Hi) => ("यह शायद पिछले हफ्ते से ज़्यादा है।", "पिछले हफ्ते"),
        (0, Lang::Zh) => ("这可能比上周多。", "上周"),
        (1, Lang::En) => ("Most of this is likely routine.", "routine"),
        (1, Lang::Es) => ("Casi todo parece rutinario.", "rutinario"),
        (1, Lang::Hi) => ("इनमें से ज़्यादातर शायद सामान्य है।", "सामान्य"),
        (1, Lang::Zh) => ("其中大部分可能是例行事务。", "例行事务"),
        (_, Lang::En) => ("Things should calm down by Friday.", "Friday"),
        (_, Lang::Es) => ("Todo debería calmarse para el viernes.", "viernes"),
        (_, Lang::Hi) => ("शुक्रवार तक चीज़ें शांत हो जानी चाहिए।", "शुक्रवार"),
        (_, Lang::Zh) => ("到周五应该会平静下来。", "周五"),
    }
}

/// The user's request for a scenario domain.
pub fn user_request(domain: super::Domain, lang: Lang, a: &str, b: &str) -> String {
    use super::Domain;
    match domain {
        Domain::Email => pick(
            lang,
            "What's new in my inbox today?".into(),
            "¿Qué hay de nuevo en mi bandeja hoy?".into(),
            "आज मेरे इनबॉक्स में क्या नया है?".into(),
            "我今天的收件箱里有什么新内容？".into(),
        ),
        Domain::Calendar => pick(
            lang,
            "What does my calendar look like today?".into(),
            "¿Cómo está mi agenda hoy?".into(),
            "आज मेरा कैलेंडर कैसा है?".into(),
            "我今天的日程怎么样？".into(),
        ),
        Domain::Finance => pick(
            lang,
            format!("How did {a} and {b} close?"),
            format!("¿Cómo cerraron {a} y {b}?"),
            format!("{a} और {b} कैसे बंद हुए?"),
            format!("{a}和{b}收盘情况如何？"),
        ),
        Domain::Web => pick(
            lang,
            format!("Summarize the article at {a}"),
            format!("Resume el artículo en {a}"),
            format!("{a} वाले लेख का सार बताइए।"),
            format!("总结一下 {a} 这篇文章。"),
        ),
        Domain::Absence => pick(
            lang,
            "Any new emails, and what's on my calendar?".into(),
            "¿Tengo correos nuevos y qué hay en mi agenda?".into(),
            "क्या कोई नया ईमेल है, और मेरे कैलेंडर में क्या है?".into(),
            "有新邮件吗？我的日程上有什么？".into(),
        ),
    }
}
