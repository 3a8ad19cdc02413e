#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpora under data/.

Deterministic: a fixed seed drives every random choice, so re-running
produces byte-identical files. All medical text below is synthetic filler
with realistic shape; none of it is real clinical advice.

Usage: python scripts/make_fixtures.py [--root PATH]
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

SEED = 20240817

BASE_QA = [
    ("What is colorectal cancer?",
     "Colorectal cancer is a malignant growth that starts in the lining of the colon or rectum, usually developing from small polyps over several years."),
    ("What are the early symptoms of colorectal cancer?",
     "Early disease is often silent; warning signs include a persistent change in bowel habits, blood in the stool, narrow stools, cramping, and unexplained weight loss."),
    ("At what age should I start colorectal cancer screening?",
     "Average-risk adults are generally advised to begin screening at age 45, earlier when there is a family history or an inherited syndrome."),
    ("How often should I have a colonoscopy?",
     "With a normal result and average risk, every ten years is typical; shorter intervals are used after polyps or with elevated risk."),
    ("What is a colonoscopy and how is it performed?",
     "A colonoscopy examines the whole colon with a flexible camera inserted through the rectum, usually under sedation, and allows polyps to be removed during the same visit."),
    ("How should I prepare for a colonoscopy?",
     "Preparation combines a low-residue then clear-liquid diet with a prescribed laxative solution the day before, so the bowel is completely empty."),
    ("Does a positive stool test mean I have cancer?",
     "No. A positive stool test only flags hidden blood or DNA changes; most positives are explained by polyps or benign causes, but a follow-up colonoscopy is needed."),
    ("Are colon polyps dangerous?",
     "Most polyps are benign, but adenomatous polyps can slowly turn malignant, which is why they are removed when found."),
    ("Is colorectal cancer hereditary?",
     "Most cases are sporadic, yet up to one in four patients has a family history, and syndromes such as Lynch syndrome sharply raise lifetime risk."),
    ("What foods increase the risk of colorectal cancer?",
     "Diets heavy in processed meat, red meat, and alcohol with little fiber are associated with higher risk; fiber, vegetables, and whole grains are protective."),
    ("Can exercise lower my risk of colon cancer?",
     "Yes. Regular physical activity is consistently associated with a lower risk of colon cancer and better outcomes after treatment."),
    ("What are the stages of colorectal cancer?",
     "Staging runs from stage 0, confined to the inner lining, through stage IV, where the tumor has spread to distant organs such as the liver or lungs."),
    ("How is colorectal cancer treated?",
     "Treatment depends on stage and usually combines surgical resection with chemotherapy, sometimes radiation for rectal tumors, and targeted drugs in advanced disease."),
    ("What is chemotherapy like for colon cancer?",
     "Chemotherapy is given in cycles over several months; common effects include fatigue, nausea, and tingling hands, and supportive medicines control most symptoms."),
    ("Will I need a stoma after colon cancer surgery?",
     "Most patients do not need a permanent stoma; a temporary one is sometimes created to protect the join while it heals, then reversed."),
    ("How long is recovery after colon surgery?",
     "Hospital stays are typically under a week, and most people return to normal activity within four to six weeks, sooner after keyhole surgery."),
    ("What follow-up is needed after colorectal cancer treatment?",
     "Follow-up combines regular clinic visits, blood tests for tumor markers, imaging, and surveillance colonoscopies on a schedule set by your team."),
    ("Can colorectal cancer come back after treatment?",
     "Recurrence is possible, most often within the first three years, which is why structured surveillance matters; many recurrences can still be treated."),
    ("What is the survival rate for colorectal cancer?",
     "Survival depends strongly on stage: localized disease has excellent outcomes, while later stages are harder to treat, so early detection matters most."),
    ("Does blood in the stool always mean cancer?",
     "No. Hemorrhoids and fissures are far more common causes, but visible blood should always be checked rather than assumed harmless."),
    ("Is a virtual colonoscopy as good as a regular one?",
     "CT colonography finds most large polyps but cannot remove anything, so any positive finding still leads to a conventional colonoscopy."),
    ("What happens if a polyp is found during my colonoscopy?",
     "The polyp is usually removed on the spot and sent for analysis; the result decides how soon your next surveillance examination should be."),
    ("Can young people get colorectal cancer?",
     "Yes. Rates in adults under 50 have been rising, which is one reason screening now starts earlier and persistent symptoms deserve attention at any age."),
    ("How accurate are stool DNA tests?",
     "Stool DNA tests detect most cancers and many advanced polyps but miss some lesions and produce false positives, so they complement rather than replace colonoscopy."),
]

CONDITIONS = [
    "colorectal cancer", "rectal cancer", "colon polyps", "ulcerative colitis",
    "Crohn's disease", "irritable bowel syndrome", "diverticulitis", "hemorrhoids",
    "anal fissure", "bowel obstruction", "celiac disease", "enteritis",
    "gastroenteritis", "appendicitis", "ischemic colitis", "intestinal tuberculosis",
    "familial adenomatous polyposis", "Lynch syndrome", "colorectal adenoma",
    "proctitis",
]

LOOKUP_TEMPLATES = [
    ("What is {d}?",
     "{D} is a condition of the digestive tract; this entry summarizes how it presents and how it is usually managed."),
    ("What are the symptoms of {d}?",
     "Typical symptoms of {d} include abdominal discomfort and altered bowel habits; the exact pattern varies from person to person."),
    ("How is {d} diagnosed?",
     "Diagnosis of {d} combines a clinical history with examinations such as blood tests, imaging, or endoscopy as appropriate."),
    ("How is {d} treated?",
     "Treatment for {d} ranges from lifestyle measures and medication to procedures, depending on severity and response."),
    ("What causes {d}?",
     "The causes of {d} involve a mix of genetic background, environment, and lifestyle; no single factor explains every case."),
    ("Can {d} be prevented?",
     "Some risk for {d} is modifiable through diet, activity, and timely checkups, though not every case is preventable."),
    ("Is {d} hereditary?",
     "Family history can raise the likelihood of {d} in some families; discuss screening earlier if close relatives are affected."),
    ("What diet is recommended for {d}?",
     "Dietary advice for {d} emphasizes regular balanced meals; specific restrictions depend on the individual case."),
    ("When should I see a doctor about {d}?",
     "Seek medical review for {d} when symptoms persist beyond a few weeks, worsen, or include bleeding, fever, or weight loss."),
    ("Does {d} increase cancer risk?",
     "Whether {d} changes long-term cancer risk depends on the condition and its duration; surveillance advice differs accordingly."),
    ("{D} warning signs explained",
     "Warning signs of {d} that deserve prompt attention include escalating pain, bleeding, and symptoms that interrupt sleep."),
    ("{D} recovery and follow-up care",
     "After treatment for {d}, follow-up focuses on confirming recovery, catching recurrence early, and adjusting medication."),
]

# 13 conversation themes, one per expected topic cluster. Each theme has a
# vocabulary of patient questions and a doctor answer fragment pool.
THEMES = [
    ("screening", [
        "When should I book my first screening test for bowel cancer?",
        "Is the stool screening kit reliable enough on its own?",
        "My screening letter arrived, do I really need to respond now?",
        "How often does screening repeat once I start?",
        "Does screening differ if my mother had bowel cancer?",
        "Can I choose between the stool kit and a scope for screening?",
        "What age does screening stop being offered?",
        "Is screening painful or risky at all?",
    ], "Screening finds trouble before symptoms start; the usual advice is to begin at 45 and repeat on the schedule your result sets."),
    ("symptoms", [
        "I have seen streaks of blood on the paper, should I worry?",
        "My bowel habit changed three weeks ago, is that significant?",
        "Are pencil-thin stools a real warning sign?",
        "I feel bloated every evening, could that be serious?",
        "Does alternating constipation and diarrhea mean anything?",
        "I lost four kilograms without trying, is that a red flag?",
        "Is mucus in the stool ever normal?",
        "My stomach cramps after every meal lately, what could it be?",
    ], "Any persistent change in bowel habit or visible blood deserves examination; most causes are benign but checking is the only way to know."),
    ("diet", [
        "Which foods should I cut down to protect my bowel?",
        "Is red meat really linked to bowel cancer?",
        "How much fiber per day actually helps?",
        "Are fermented foods good for my gut?",
        "Should I take a fiber supplement or just eat more vegetables?",
        "Is alcohol a meaningful risk for my colon?",
        "Do processed sausages deserve their bad reputation?",
        "Will a vegetarian diet lower my risk?",
    ], "A fiber-rich diet with less processed meat and alcohol is the pattern most consistently tied to lower bowel risk."),
    ("surgery recovery", [
        "How soon can I walk around after bowel surgery?",
        "When does the wound stop hurting after a resection?",
        "What can I eat in the first week after colon surgery?",
        "When is it safe to drive again after my operation?",
        "How long before I can lift my grandchild after surgery?",
        "Is it normal to feel exhausted two weeks after the operation?",
        "When will my bowel habit settle after the resection?",
        "What warning signs after surgery mean I should call the ward?",
    ], "Recovery after bowel surgery is gradual: short walks from day one, light meals as the bowel wakes, and no heavy lifting for six weeks."),
    ("chemotherapy", [
        "How many chemotherapy cycles are typical for colon cancer?",
        "Will I lose my hair on this chemotherapy plan?",
        "How do I handle nausea on treatment days?",
        "Is it safe to work through chemotherapy?",
        "Why do my fingertips tingle after each infusion?",
        "Can I have dental work during chemotherapy?",
        "What blood counts do you watch during my cycles?",
        "Should I avoid crowds while on chemotherapy?",
    ], "Chemotherapy for bowel cancer usually runs in cycles over a few months; nausea and tingling are common and manageable, and your counts guide each cycle."),
    ("polyps", [
        "The scope found two small polyps, how worried should I be?",
        "Do removed polyps grow back in the same spot?",
        "What does a tubular adenoma on my report mean?",
        "How soon is my next scope after polyp removal?",
        "Can polyps cause bleeding on their own?",
        "Are flat polyps harder to find than raised ones?",
        "Does everyone grow polyps with age?",
        "My report says hyperplastic polyp, is that the safe kind?",
    ], "Most polyps are benign and removal ends the risk from that polyp; the pathology report sets how soon the next surveillance scope should be."),
    ("hereditary risk", [
        "My father had bowel cancer at fifty, what does that mean for me?",
        "Should my siblings be tested after my diagnosis?",
        "What exactly is Lynch syndrome?",
        "Is genetic testing worth it in my family?",
        "Do inherited syndromes always cause cancer eventually?",
        "At what age should children of patients start checks?",
        "Does risk come from the mother's or father's side equally?",
        "My family has many polyps across generations, is that a syndrome?",
    ], "A close relative with early bowel cancer usually moves screening earlier for the family, and a genetics referral can clarify inherited risk."),
    ("colonoscopy preparation", [
        "The prep drink makes me gag, any tricks to finish it?",
        "Can I drink coffee the morning before my colonoscopy?",
        "What does a low-residue diet actually allow?",
        "How early should I start the bowel prep the night before?",
        "Is it normal for the prep to keep me up all night?",
        "Which medicines must I pause before the scope?",
        "My prep never ran clear, will they cancel the scope?",
        "Can I take the prep in two split doses?",
    ], "Good preparation is the key to a useful scope: split-dose laxative, clear liquids, and chilled drinks make the solution easier to finish."),
    ("pain management", [
        "What painkiller is safe for my abdominal cramps?",
        "The sedation wore off and I am sore, is that expected?",
        "How do I manage pain at night after the procedure?",
        "Is a heat pad safe on my abdomen after surgery?",
        "Can I combine paracetamol with the prescribed tablets?",
        "Why does trapped wind hurt so much after the scope?",
        "When should pain after a procedure make me call in?",
        "Are opioid painkillers risky for my bowel?",
    ], "Mild soreness and trapped wind settle with walking and simple analgesia; escalating pain, fever, or a rigid abdomen need urgent review."),
    ("medication", [
        "Do I keep taking aspirin before the procedure?",
        "How should I time my blood pressure pills on prep day?",
        "Can antibiotics upset the bowel this much?",
        "Is it safe to use loperamide for every loose stool?",
        "Do iron tablets really darken the stool?",
        "Should probiotics be taken during antibiotics?",
        "My new tablet causes constipation, can I adjust it?",
        "Which over-the-counter laxative is gentlest?",
    ], "Bring every medicine list to the clinic: blood thinners and iron usually pause before a scope, and most others continue with small sips."),
    ("staging", [
        "What does T3 N1 mean on my report?",
        "How is the stage of a bowel tumor decided?",
        "Does a spread to two lymph nodes change my outlook a lot?",
        "What scans complete the staging after the biopsy?",
        "Is stage two with clear nodes considered early?",
        "Can staging change after the surgery pathology?",
        "What does M0 stand for in my letter?",
        "Why does staging matter for choosing chemotherapy?",
    ], "Staging combines scans and surgical pathology: T describes the tumor depth, N the lymph nodes, and M distant spread, and together they steer treatment."),
    ("prevention lifestyle", [
        "Does quitting smoking really help my colon?",
        "How much exercise per week lowers bowel cancer risk?",
        "Is daily aspirin worth it for prevention in my case?",
        "Can losing weight reduce my polyp risk?",
        "Does vitamin D play any role in bowel health?",
        "Is there any proven supplement for prevention?",
        "How strong is the link between obesity and bowel cancer?",
        "Will better sleep genuinely affect my gut health?",
    ], "No pill replaces the basics: staying active, keeping a healthy weight, and not smoking each independently lower long-term bowel risk."),
    ("infection", [
        "Can a colonoscopy introduce an infection?",
        "My wound looks red at one edge, is that infected?",
        "How do I avoid stomach bugs while on chemotherapy?",
        "Is a fever after the procedure an emergency?",
        "Do I need antibiotics before the scope because of my heart valve?",
        "How is equipment sterilized between patients?",
        "What hygiene habits protect my healing wound?",
        "Can food poisoning be dangerous right after bowel surgery?",
    ], "Infection after a scope is rare because scopes are fully reprocessed between patients; fever, spreading redness, or discharge still warrant a same-day call."),
]

POST_SEEDS = [
    # (title fragment, body fragment, tags)
    ("My rectal cancer diagnosis story", "The day the biopsy confirmed rectal cancer everything slowed down; writing here keeps me steady.", ["rectal cancer", "diary"]),
    ("Radiation before rectal surgery", "Five weeks of radiotherapy for my rectal cancer shrank the tumor enough for surgery.", ["rectal cancer", "treatment"]),
    ("Questions to ask about rectal cancer", "A list I wish I had at my first rectal cancer appointment, from staging to stoma planning.", ["rectal cancer"]),
    ("Life with a temporary stoma", "Practical tips from three months living with a stoma after rectal cancer surgery.", ["rectal cancer", "recovery story"]),
    ("Descending colon tumor found at 52", "A routine scope caught a tumor in my descending colon; surgery is booked for next month.", ["descending colon", "diagnosis"]),
    ("Left-side colon surgery recovery log", "Week by week notes after my descending colon resection, appetite and energy included.", ["descending colon", "surgery"]),
    ("Descending colon cancer chemo diary", "Tracking each cycle after my descending colon cancer operation.", ["descending colon", "chemotherapy", "diary"]),
    ("Three polyps removed this morning", "The doctor clipped three polyps during my scope; pathology comes back next week.", ["polyp", "colonoscopy"]),
    ("Polyp surveillance interval confusion", "My letter says three years after the adenoma, my friend got five; asked the clinic why.", ["polyp", "screening"]),
    ("Flat polyp almost missed", "The endoscopist showed me the photo of a flat polyp found only on the second pass.", ["polyp"]),
    ("Polyps at 35, anyone else?", "Family history on both sides; two adenomas at my first scope at thirty-five.", ["polyp", "family history"]),
    ("Bowel obstruction scare last weekend", "Cramping waves and no movement for two days turned out to be a partial obstruction.", ["obstruction", "symptom"]),
    ("Eating again after obstruction", "Low-residue meals that worked for me after my bowel obstruction admission.", ["obstruction", "diet"]),
    ("Obstruction after surgery adhesions", "Scar tissue from my old operation caused an obstruction; here is how it was managed.", ["obstruction", "surgery"]),
    ("Enteritis flare handling", "What settles my enteritis flares: rest, fluids, and a boring diet for a week.", ["enteritis", "diary"]),
    ("Radiation enteritis questions", "After pelvic radiotherapy my bowel never fully settled; the team calls it radiation enteritis.", ["enteritis", "treatment"]),
    ("Enteritis or something worse?", "Recurring enteritis episodes pushed me to ask for a full workup; sharing the plan.", ["enteritis"]),
    ("One year cancer-free today", "Twelve months since my last treatment; my anti-cancer diary from diagnosis to today.", ["diary", "recovery story"]),
    ("Chemo diary, cycle six of twelve", "Halfway through; the routine that keeps me functional on infusion weeks.", ["diary", "chemotherapy"]),
    ("Dad's recovery journey, shared with permission", "Writing my father's bowel cancer journey so other families know what to expect.", ["journey", "diary"]),
    ("Small wins diary during treatment", "Collecting the small wins: a full meal, a short walk, a normal blood count.", ["diary"]),
    ("Blood in stool, my honest timeline", "From first spotting blood to the all-clear scope, with every date and feeling.", ["blood", "symptom"]),
    ("Night cramps and bloating thread", "Does anyone else get evening bloating with cramps? Collecting what helped below.", ["symptom", "pain"]),
    ("Pencil stools sent me to the clinic", "The shape change lasted a month; the scope found a benign stricture, not cancer.", ["symptom"]),
    ("Fatigue as the only warning sign", "No bleeding, no pain, just exhaustion; my anemia came from a silent tumor.", ["symptom", "blood"]),
    ("First colonoscopy at 45, full report", "Booking, prep, sedation, results: everything about my first screening colonoscopy.", ["colonoscopy", "screening"]),
    ("Stool test positive, scope negative", "My screening kit flagged blood but the colonoscopy was clean; hemorrhoids were the cause.", ["screening", "diagnosis"]),
    ("CT colonography experience", "Claustrophobic but quick; my virtual colonoscopy found nothing and took twenty minutes.", ["colonoscopy", "diagnosis"]),
    ("Diagnosis day, what helped me cope", "The scans, the waiting, the phone call: how I got through diagnosis week.", ["diagnosis", "diary"]),
    ("Choosing between two hospitals", "How I compared surgical volumes and waiting times before picking my treatment hospital.", ["hospital", "treatment"]),
    ("Keyhole surgery questions answered", "Everything the surgeon told me about laparoscopic bowel surgery before my operation.", ["surgery", "hospital"]),
    ("Day ward chemotherapy setup", "What the infusion suite actually looks like and what to bring for a long session.", ["chemotherapy", "hospital"]),
    ("Second opinion changed my plan", "A second surgical opinion moved me from open to keyhole surgery; worth the extra week.", ["treatment", "surgery"]),
    ("Physio after bowel surgery", "The core exercises my physiotherapist set after my resection, week by week.", ["surgery", "recovery story"]),
    ("Paying for treatment, practical notes", "Insurance paperwork, travel costs, and the fund that covered my gap.", ["treatment"]),
    ("Radiotherapy skin care routine", "Creams and timing that kept my skin intact through pelvic radiotherapy.", ["treatment"]),
    ("Hospital meal survival guide", "How I kept eating on the ward: snacks that pass the low-residue rules.", ["hospital", "diet"]),
]

AD_POSTS = [
    ("Miracle fiber blend, 50% off this week", "Our proprietary fiber blend sweeps your colon clean; buy two tins and join thousands of happy customers.", ["diet"], True),
    ("Private screening package promotion", "Book our premium screening bundle today; limited slots, instant certificates.", ["screening"], True),
    ("Detox tea trusted by survivors", "This detox tea claims to flush toxins after treatment; discount code inside.", ["treatment"], True),
    ("Clinic launch: free consultation gifts", "New branch opening; first hundred bookings receive a wellness hamper.", ["hospital"], True),
    ("Supplement stack for gut health", "Our three-step capsule stack balances your microbiome; subscribe and save.", ["diet"], True),
]


def qa_id(prefix: str, i: int) -> str:
    return f"{prefix}-{i:04d}"


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def build_base(root: Path) -> int:
    records = [
        {"id": qa_id("base", i), "question": q, "answer": a, "disease_tags": ["colorectal cancer"]}
        for i, (q, a) in enumerate(BASE_QA)
    ]
    write_jsonl(root / "fixtures" / "base_qa.jsonl", records)
    return len(records)


def build_lookup(root: Path) -> int:
    records = []
    i = 0
    for condition in CONDITIONS:
        for q_tpl, a_tpl in LOOKUP_TEMPLATES:
            cap = condition[0].upper() + condition[1:]
            records.append({
                "id": qa_id("lookup", i),
                "question": q_tpl.format(d=condition, D=cap),
                "answer": a_tpl.format(d=condition, D=cap),
                "disease_tags": [condition],
            })
            i += 1
    write_jsonl(root / "fixtures" / "lookup_qa.jsonl", records)
    return len(records)


def build_conversations(root: Path, rng: random.Random) -> int:
    # Turn-pattern pool: P=patient, D=doctor. Varied run lengths exercise
    # the pairing rule; every pattern yields one or two pairs.
    patterns = [
        ["P", "D"],
        ["P", "D", "P", "D"],
        ["P", "P", "D"],
        ["P", "D", "D"],
        ["P", "P", "D", "D", "P", "D"],
        ["D", "P", "D"],          # leading doctor turn is skipped
        ["P", "D", "P"],          # trailing patient turn is dropped
    ]
    rephrasings = [
        "Could you explain something: {q}",
        "My family keeps asking me this: {q}",
        "Sorry if this is basic, but {q}",
    ]
    conversations = []
    pair_total = 0
    conv_i = 0
    for theme_name, questions, answer_stub in THEMES:
        variants = []
        for q_text in questions:
            variants.append(q_text)
            tpl = rng.choice(rephrasings)
            variants.append(tpl.format(q=q_text[0].lower() + q_text[1:]))
        for q_text in variants:
            pattern = rng.choice(patterns)
            turns = []
            q_iter = iter([q_text] + [
                f"{q_text.rstrip('?')} , and {extra}?" for extra in
                ("what should I do next", "is that normal at my age", "how urgent is it")
            ])
            for speaker in pattern:
                if speaker == "P":
                    try:
                        text = next(q_iter)
                    except StopIteration:
                        text = f"One more thing about {theme_name}, please."
                    turns.append({"speaker": "patient", "text": text})
                else:
                    turns.append({"speaker": "doctor", "text": answer_stub})
            conversations.append({"id": f"conv-{conv_i:04d}", "turns": turns})
            # count pairs the same way the loader will: run-length merge
            pair_total += _count_pairs(pattern)
            conv_i += 1
    write_jsonl(root / "fixtures" / "conversations.jsonl", conversations)
    return pair_total


def _count_pairs(pattern: list[str]) -> int:
    pairs = 0
    i = 0
    n = len(pattern)
    while i < n:
        if pattern[i] == "P":
            while i < n and pattern[i] == "P":
                i += 1
            if i < n and pattern[i] == "D":
                while i < n and pattern[i] == "D":
                    i += 1
                pairs += 1
        else:
            i += 1
    return pairs


def build_posts(root: Path, rng: random.Random) -> int:
    records = []
    base_ts = 1_700_000_000
    all_posts = [(t, b, tags, False) for t, b, tags in POST_SEEDS] + AD_POSTS
    # pad to 50 with tagless community chatter (falls to the last category)
    fillers = [
        ("Waiting room small talk", "Sharing what the waiting room taught me about patience.", [], False),
        ("Gratitude post for the nurses", "The night shift nurses deserve every award there is.", [], False),
        ("Looking for walking buddies", "Anyone else rebuilding stamina with morning walks?", [], False),
        ("Book recommendations during recovery", "Light reads that got me through the slow weeks.", [], False),
        ("How do you tell your kids?", "Talking to children about a parent's illness, gently.", [], False),
        ("Celebrating normal blood counts", "Small milestone today and I am taking it.", [], False),
        ("Insurance paperwork rant", "Four forms, three stamps, two phone calls, one approval.", [], False),
        ("Meal train etiquette question", "What dishes actually help a family in treatment weeks?", [], False),
    ]
    all_posts += fillers
    for i, (title, body, tags, ad_flag) in enumerate(all_posts):
        records.append({
            "id": f"post-{i:04d}",
            "title": title,
            "body": body,
            "tags": tags,
            "likes": rng.randint(0, 500),
            "comments": rng.randint(0, 120),
            "shares": rng.randint(0, 60),
            "collections": rng.randint(0, 80),
            "ad_flag": ad_flag,
            "created_at": base_ts + rng.randint(0, 10_000_000),
        })
    write_jsonl(root / "fixtures" / "posts.jsonl", records)
    return len(records)


def build_configs(root: Path) -> None:
    config_dir = root / "config"
    config_dir.mkdir(parents=True, exist_ok=True)

    app = {
        "data_dir": "data",
        "provider": {"kind": "hashed", "dim": 64, "seed": 0},
        "llm": {"kind": "scripted", "script_path": "config/stub_server.json"},
        "greeting": "Hello! I can answer any questions about colorectal cancer. Ask me anything, or pick one of the suggested questions below.",
        "host": "127.0.0.1",
        "port": 8000,
    }
    (config_dir / "app.json").write_text(
        json.dumps(app, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    # Server stub: alternating answer / follow-up-list replies, consumed in
    # order by respond (answer, then follow-up refresh). The first answer
    # mentions an ECG so the select-to-explain walkthrough has a term to pick.
    answers = [
        "Before scheduling the colonoscopy we run a short checkup, including an ECG to confirm your heart handles sedation well.",
        "An ECG records the electrical activity of your heart through small chest stickers; it is quick, painless, and has no radiation.",
        "That symptom pattern is common and usually benign, but a persistent change is exactly what a colonoscopy is designed to clarify.",
        "Preparation matters more than anything else: clear liquids the day before and the full laxative course give the clearest view.",
        "Most small polyps are removed during the scope itself, and the pathology report guides when you next need surveillance.",
        "Screening from age 45 is the general rule; a family history usually moves that earlier, so mention it at booking.",
        "Mild cramping and wind after the procedure settle within a day; severe pain or fever would be a reason to call us.",
        "A balanced high-fiber diet with less processed meat is the most evidence-backed everyday protection for your bowel.",
    ]
    followup_lists = [
        "What should I eat the day before the procedure?\nHow long does the sedation last?\nCan I drive myself home afterwards?\nWhat happens if a polyp is found?",
        "Is the ECG done on the same day?\nDo I need to fast before the checkup?\nWhat if my heart rhythm is irregular?\nHow long does the whole assessment take?",
        "How do I book the colonoscopy slot?\nWhat symptoms should make me call earlier?\nIs the test painful without sedation?\nHow accurate is a colonoscopy?",
        "Which laxative works best?\nCan I drink coffee during the prep?\nWhat medicines must I pause?\nHow do I know the prep worked?",
        "How often do polyps come back?\nWhat does the pathology report say?\nWhen is my next scope due?\nAre polyps hereditary?",
        "Does insurance cover earlier screening?\nWhich relatives count for family history?\nShould my siblings book a scope too?\nWhat age should my children start?",
        "What painkillers are safe afterwards?\nHow much rest do I need?\nWhen can I eat normally again?\nWhat are signs of a complication?",
        "Which foods have the most fiber?\nIs red meat safe in moderation?\nDo supplements replace fiber from food?\nHow fast does diet change risk?",
    ]
    server_replies = []
    for answer, followups in zip(answers, followup_lists):
        server_replies.append(answer)
        server_replies.append(followups)
    # spare generic entries for topic switches / classifications
    server_replies += [
        "What does the bowel prep involve?\nCan the diet be adjusted for diabetes?\nHow strict is the clear-liquid rule?\nWhat if I cannot finish the drink?",
        "Dietary Preparation",
        "What screening options exist besides colonoscopy?\nHow reliable is the stool kit?\nWhat age does screening start?\nHow often is it repeated?",
        "Colonoscopy Information",
    ] * 3
    (config_dir / "stub_server.json").write_text(
        json.dumps({"replies": server_replies}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    # Eval stub: 24 base questions x 3 LLM-backed methods, plus spares.
    eval_replies = []
    for i in range(80):
        eval_replies.append(
            f"What early signs should I watch for (set {i})?\n"
            f"How is the condition usually confirmed (set {i})?\n"
            f"Which treatment options come first (set {i})?\n"
            f"What lifestyle changes help most (set {i})?"
        )
    (config_dir / "stub_eval.json").write_text(
        json.dumps({"replies": eval_replies}, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="data", help="output root directory")
    args = parser.parse_args()
    root = Path(args.root)
    rng = random.Random(SEED)

    n_base = build_base(root)
    n_lookup = build_lookup(root)
    n_pairs = build_conversations(root, rng)
    n_posts = build_posts(root, rng)
    build_configs(root)
    print(f"base={n_base} lookup={n_lookup} conv_pairs={n_pairs} posts={n_posts}")


if __name__ == "__main__":
    main()
