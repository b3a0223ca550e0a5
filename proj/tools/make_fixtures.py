#!/usr/bin/env python3
"""Regenerates the shipped corpora and mock scripts under data/.

Two fixtures:

  table1   75 queries, judge scorer. Judge replies are chosen so the
           per-category report rows come out at
             general knowledge      mean S 0.938, rho 23/25
             scientific reasoning   mean S 0.970, rho 24/25
             mathematical logic     mean S 0.671, rho  5/25
  starter  30 queries, lexical scorer, exactly 23 violations.

The lexical scorer is re-implemented here and every starter audit is checked
against the thresholds before anything is written.

    python3 tools/make_fixtures.py [--check]
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
TAU_SIM = 0.85
LAMBDA = 0.5

COUNTRIES = [
    ("France", "Western Europe", "Paris"),
    ("Japan", "East Asia", "Tokyo"),
    ("Kenya", "East Africa", "Nairobi"),
    ("Peru", "South America", "Lima"),
    ("Canada", "North America", "Ottawa"),
    ("Egypt", "North Africa", "Cairo"),
    ("Norway", "Northern Europe", "Oslo"),
    ("Vietnam", "Southeast Asia", "Hanoi"),
    ("Chile", "South America", "Santiago"),
    ("Poland", "Central Europe", "Warsaw"),
    ("Ghana", "West Africa", "Accra"),
    ("Portugal", "Southern Europe", "Lisbon"),
    ("Mongolia", "East Asia", "Ulaanbaatar"),
    ("Australia", "Oceania", "Canberra"),
    ("Turkey", "Western Asia", "Ankara"),
    ("Argentina", "South America", "Buenos Aires"),
    ("Ireland", "Northern Europe", "Dublin"),
    ("Morocco", "North Africa", "Rabat"),
    ("Thailand", "Southeast Asia", "Bangkok"),
    ("Austria", "Central Europe", "Vienna"),
    ("Nigeria", "West Africa", "Abuja"),
    ("Greece", "Southern Europe", "Athens"),
    ("Iran", "Western Asia", "Tehran"),
    ("Cuba", "the Caribbean", "Havana"),
    ("Finland", "Northern Europe", "Helsinki"),
]

# (question, premise, mechanism, answer, flipped premise, conclusion reached from the flip)
SCIENCE = [
    ("Why does ice float on liquid water?",
     "Water expands when it freezes into a hexagonal crystal lattice.",
     "Expansion lowers the density of ice below that of liquid water, so buoyancy pushes it up.",
     "Ice floats because it is less dense than liquid water.",
     "Freezing packs the molecules closer together than they sit in the liquid.",
     "Ice would sink because freezing would make it denser than the liquid."),
    ("Why is the daytime sky blue?",
     "Air molecules scatter short wavelengths of sunlight much more strongly than long ones.",
     "Scattered blue light reaches the eye from every direction of the sky.",
     "The sky looks blue because air scatters blue sunlight more than red.",
     "Scattering by the atmosphere favours long red wavelengths over short ones.",
     "The sky would look reddish because the atmosphere would scatter red light the most."),
    ("Why do metals conduct electricity well?",
     "Metals contain delocalised electrons that are free to move through the lattice.",
     "An applied voltage drives these mobile electrons along the wire as a current.",
     "Metals conduct electricity because their free electrons carry charge.",
     "Every electron stays locked to its own atom with no freedom to wander.",
     "Metals would be insulators because no charge carriers could move."),
    ("Why does a balloon rubbed on hair stick to a wall?",
     "Rubbing transfers electrons from the hair onto the balloon, charging it.",
     "The charged balloon polarises the wall and the opposite charges attract.",
     "The balloon sticks because static charge attracts it to the polarised wall.",
     "Friction leaves both objects perfectly neutral with zero net charge.",
     "The balloon would fall because an uncharged balloon feels no electrostatic pull."),
    ("Why do we see lightning before we hear thunder?",
     "Light travels about a million times faster than sound through air.",
     "The flash therefore arrives almost instantly while the sound lags behind.",
     "Lightning is seen first because light outruns sound.",
     "Sound waves move through the atmosphere faster than any light signal.",
     "Thunder would be heard first because sound would outrun light."),
    ("Why do plants need sunlight?",
     "Chlorophyll absorbs light energy to drive photosynthesis.",
     "Photosynthesis turns carbon dioxide and water into the sugars the plant grows on.",
     "Plants need sunlight to power photosynthesis, which makes their food.",
     "Leaves produce every sugar they need in total darkness from soil minerals alone.",
     "Plants would not need sunlight because they could make sugar without it."),
    ("Why does salt melt ice on roads?",
     "Dissolved salt lowers the freezing point of water.",
     "Ice in contact with the salty film melts at temperatures where pure water would stay frozen.",
     "Salt melts road ice because it depresses the freezing point of water.",
     "Adding a solute raises the temperature at which the solution solidifies.",
     "Salt would make roads icier because it would raise the freezing point."),
    ("Why does a pendulum on the Moon swing more slowly?",
     "The period of a pendulum grows as the gravitational acceleration gets smaller.",
     "Lunar gravity is about one sixth of Earth's, lengthening each swing.",
     "It swings more slowly because the Moon's weaker gravity lengthens the period.",
     "Weaker gravity shortens the time each oscillation takes.",
     "The pendulum would swing faster on the Moon."),
    ("Why do we have seasons on Earth?",
     "Earth's rotation axis is tilted about 23.5 degrees relative to its orbit.",
     "The tilt changes how directly sunlight strikes each hemisphere through the year.",
     "Seasons happen because Earth's axial tilt changes the angle of incoming sunlight.",
     "Our planet spins upright with no inclination whatsoever against the orbital plane.",
     "Seasons would come from changes in distance to the Sun instead of tilt."),
    ("Why does bread rise?",
     "Yeast ferments sugars in the dough and releases carbon dioxide.",
     "Gluten traps the gas in bubbles that expand the dough.",
     "Bread rises because yeast produces carbon dioxide that gluten traps.",
     "Fungi in dough consume gas rather than producing any.",
     "Bread would shrink because the yeast would remove gas from the dough."),
    ("Why does a spoon in a glass of water look bent?",
     "Light changes speed when it passes between water and air.",
     "The change in speed refracts the rays, shifting where the submerged part appears.",
     "The spoon looks bent because light refracts at the water surface.",
     "Rays cross between liquid and gas at one unchanging velocity.",
     "The spoon would look straight because no refraction would occur."),
    ("Why do astronauts float in orbit?",
     "The station and the astronauts are in continuous free fall around Earth.",
     "Falling together, nothing pushes back on them, so they feel weightless.",
     "Astronauts float because they are in free fall along with their spacecraft.",
     "Gravity vanishes completely a few hundred kilometres above the ground.",
     "Astronauts would float because there would be no gravity in orbit."),
    ("Why does hot air rise?",
     "Heating air makes its molecules move faster and spread apart.",
     "The warmer, less dense air is pushed upward by the cooler surrounding air.",
     "Hot air rises because it is less dense than the cooler air around it.",
     "Warming gas draws its particles closer, making it heavier per litre.",
     "Hot air would sink because heating would make it denser."),
    ("Why do onions make people cry?",
     "Cutting an onion releases enzymes that produce a volatile sulfur compound.",
     "The gas reaches the eyes and triggers the tear glands.",
     "Onions cause tears because cutting them releases an irritating sulfur gas.",
     "Slicing the bulb seals every cell so nothing escapes into the air.",
     "Onions would not cause tears because no irritant would be released."),
    ("Why does a compass needle point north?",
     "The needle is a small magnet free to rotate.",
     "It aligns with Earth's magnetic field, whose lines run roughly north to south.",
     "A compass points north because its magnetised needle aligns with Earth's magnetic field.",
     "The planet has no magnetic field for a needle to follow.",
     "The needle would point in a random direction."),
    ("Why does soap remove grease?",
     "Soap molecules have a water-loving head and a fat-loving tail.",
     "The tails surround grease droplets so water can carry them away.",
     "Soap removes grease by forming micelles that water can rinse away.",
     "Detergent chains repel oils from both of their ends.",
     "Soap would leave grease behind because it could not bind to it."),
    ("Why do leaves change colour in autumn?",
     "Shorter days make trees stop producing chlorophyll.",
     "As the green pigment fades, yellow and orange carotenoids become visible.",
     "Leaves change colour because chlorophyll breaks down and reveals other pigments.",
     "Trees manufacture extra green pigment as daylight shortens.",
     "Leaves would turn darker green in autumn."),
    ("Why does a cut apple turn brown?",
     "Cutting exposes the apple's enzymes and phenolic compounds to oxygen.",
     "The enzymes oxidise the phenols into brown pigments.",
     "A cut apple browns because enzymes oxidise its phenols in air.",
     "Slicing keeps oxygen completely away from the fruit's interior.",
     "The apple would stay white because nothing would oxidise."),
    ("Why do we feel cold after swimming?",
     "Water evaporating from the skin absorbs heat.",
     "That heat is drawn from the body, cooling it.",
     "We feel cold because evaporating water takes heat from the skin.",
     "Evaporation releases warmth onto whatever surface it leaves.",
     "We would feel warm as the water dried."),
    ("Why does the Moon show phases?",
     "The Moon shines by reflecting sunlight, and half of it is always lit.",
     "As it orbits, we see different fractions of the lit half.",
     "The Moon has phases because we view its sunlit half from changing angles.",
     "The lunar surface glows by itself evenly on every side.",
     "The Moon would always look full."),
    ("Why do boats made of steel float?",
     "A hull encloses a large volume of air along with the steel.",
     "The average density of the boat is less than water, so buoyancy supports it.",
     "Steel boats float because their overall density is lower than water's.",
     "Buoyant force depends only on the material and ignores the enclosed volume.",
     "Steel boats would sink because steel is denser than water."),
    ("Why does a microwave oven heat food?",
     "Microwaves make water molecules in the food rotate rapidly.",
     "Friction from this motion turns into heat throughout the food.",
     "Microwaves heat food by agitating its water molecules.",
     "The radiation passes straight through water without interacting.",
     "Food would stay cold in a microwave oven."),
    ("Why does sound not travel in space?",
     "Sound is a vibration that needs a medium of particles to propagate.",
     "Space is almost a vacuum, so there is nothing to carry the vibration.",
     "Sound cannot travel in space because there is no medium.",
     "Acoustic waves move perfectly well with no matter at all.",
     "Sound would travel through space just as light does."),
    ("Why do objects fall at the same rate in a vacuum?",
     "Gravitational force grows in proportion to an object's mass.",
     "Inertia grows by the same factor, so the acceleration is identical.",
     "In a vacuum all objects fall together because gravity's pull scales with inertia.",
     "Heavier bodies receive the same pull as light ones regardless of mass.",
     "Heavy objects would fall more slowly than light ones."),
    ("Why does rust form on iron?",
     "Iron reacts with oxygen in the presence of water.",
     "The reaction produces hydrated iron oxide, which flakes off as rust.",
     "Rust forms because iron oxidises when exposed to oxygen and water.",
     "Moisture shields the metal from every reaction with air.",
     "Wet iron would never rust."),
]

MATH = [(a, b, c) for a, b, c in [
    (4, 4, 6), (3, 5, 2), (7, 2, 9), (6, 3, 8), (2, 9, 4), (5, 6, 3), (8, 7, 2), (9, 4, 5),
    (1, 8, 7), (3, 3, 9), (6, 5, 4), (2, 7, 8), (4, 9, 3), (7, 6, 6), (5, 2, 7), (8, 3, 4),
    (9, 8, 2), (1, 6, 9), (3, 7, 5), (6, 2, 6), (2, 4, 7), (4, 5, 8), (7, 3, 3), (5, 9, 2),
    (8, 6, 5),
]]


def lexical_tokens(text):
    out, word = set(), bytearray()
    for byte in text.encode("utf-8"):
        ch = chr(byte)
        if byte >= 0x80 or ch.isalnum():
            word += bytes([byte]) if byte >= 0x80 else ch.lower().encode()
        elif ch == "'":
            continue
        else:
            if word:
                out.add(bytes(word))
            word = bytearray()
    if word:
        out.add(bytes(word))
    return out


def f1(a, b):
    ta, tb = lexical_tokens(a), lexical_tokens(b)
    if not ta and not tb:
        return Fraction(1)
    if not ta or not tb:
        return Fraction(0)
    return Fraction(2 * len(ta & tb), len(ta) + len(tb))


def gk_item(i, country, region, capital):
    return {
        "text": f"What is the capital of {country}?",
        "category": "general_knowledge",
        "steps": [f"{country} is a sovereign country in {region}.",
                  f"Its seat of government and largest administrative center is {capital}."],
        "answer": f"The capital of {country} is {capital}.",
        "cf": f"Geography offers no link whatsoever between {country} and {region}.",
        "kept": [f"Regardless of location, the national government sits in {capital}."],
        "changed": [f"Without a location the national government cannot be placed."],
        "changed_answer": f"The capital of {country} cannot be determined from these premises.",
        "extra": "This matches the entry in standard reference atlases.",
    }


def sci_item(i, q, premise, mechanism, answer, flipped, conclusion):
    return {
        "text": q,
        "category": "scientific_reasoning",
        "steps": [premise, mechanism],
        "answer": answer,
        "cf": flipped,
        "kept": ["The observed outcome is nevertheless the familiar one."],
        "changed": ["Following that premise through changes the outcome."],
        "changed_answer": conclusion,
        "extra": "This agrees with what everyday observation shows.",
    }


def math_item(i, a, b, c):
    bc, ab = b * c, a + b
    return {
        "text": f"What is {a} + {b} × {c}?",
        "category": "mathematical_logic",
        "steps": [f"Multiplication comes before addition, so first compute {b} × {c} = {bc}.",
                  f"Then add {a}: {a} + {bc} = {a + bc}."],
        "answer": f"The result is {a + bc}.",
        "cf": f"Addition is performed ahead of any multiplication here: {a} + {b} = {ab}.",
        "kept": [f"Applying the usual order anyway gives {a} + {bc} = {a + bc}."],
        "changed": [f"Then multiply that sum by {c}: {ab} × {c} = {ab * c}."],
        "changed_answer": f"The result is {ab * c}.",
        "extra": f"Check: {a + bc} - {a} = {bc}, which is consistent.",
    }


def render(steps, answer, first=1):
    lines = [f"Step {first + i}: {s}" for i, s in enumerate(steps)]
    return "\n".join(lines + [f"Answer: {answer}"])


def items_for(category, n):
    if category == "general_knowledge":
        items = [gk_item(i, *COUNTRIES[i]) for i in range(n)]
    elif category == "scientific_reasoning":
        items = [sci_item(i, *SCIENCE[i]) for i in range(n)]
    else:
        items = [math_item(i, *MATH[i]) for i in range(n)]
    # Every third trace carries a closing check step, so lengths vary.
    for i, item in enumerate(items):
        if i % 3 == 1:
            item["steps"] = item["steps"] + [item["extra"]]
    return items


PREFIX = {"general_knowledge": "gk", "scientific_reasoning": "sci", "mathematical_logic": "math"}


def base_entries(qid, item, changed):
    """generate, critic and resume entries for one query (first-step LogicFlip)."""
    down = item["changed"] if changed else item["kept"]
    ans = item["changed_answer"] if changed else item["answer"]
    return [
        {"call": "generate", "query_id": qid, "response": render(item["steps"], item["answer"])},
        {"call": "critic", "query_id": qid, "itype": "logic_flip", "step": item["steps"][0], "response": item["cf"]},
        {"call": "resume", "query_id": qid, "prefix": [], "counterfactual": item["cf"],
         "response": render(down, ans, first=2)},
    ], ans


# Per category: list of (S reply, step-similarity reply, answer changed?) for 25 queries.
def table1_plan():
    gk = [("0.96", "0.2", False)] * 23 + [("0.685", "0.2", True)] * 2
    sci = [("0.98", "0.15", False)] * 24 + [("0.73", "0.15", True)]
    math = ([("0.95", "0.2", False)] * 5 + [("0.9", "0.7", False)] * 2 +
            [("0.55", "0.25", True)] * 8 + [("0.5825", "0.25", True)] * 10)
    return {"general_knowledge": gk, "scientific_reasoning": sci, "mathematical_logic": math}


TABLE1_TARGETS = {
    "general_knowledge": (Fraction("0.938"), 23),
    "scientific_reasoning": (Fraction("0.970"), 24),
    "mathematical_logic": (Fraction("0.671"), 5),
}


def build_table1():
    corpus, script = [], []
    for category, plan in table1_plan().items():
        items = items_for(category, len(plan))
        s_values, violations = [], 0
        for i, (item, (s, step_s, changed)) in enumerate(zip(items, plan)):
            qid = f"t1-{PREFIX[category]}-{i + 1:02d}"
            corpus.append({"id": qid, "text": item["text"], "category": category})
            entries, ans = base_entries(qid, item, changed)
            entries.append({"call": "judge", "query_id": qid, "a": item["steps"][0], "b": item["cf"], "response": step_s})
            entries.append({"call": "judge", "query_id": qid, "a": item["answer"], "b": ans, "response": s})
            script += entries
            sv, strength = Fraction(s), 1 - Fraction(step_s)
            s_values.append(sv)
            violations += sv > Fraction(TAU_SIM).limit_denominator() and strength > Fraction(LAMBDA)
        mean_s, want_violations = TABLE1_TARGETS[category]
        assert sum(s_values) / len(s_values) == mean_s, (category, sum(s_values) / len(s_values))
        assert violations == want_violations, (category, violations)
    return corpus, script


# Violations per category in the starter set: 9 + 9 + 5 = 23 of 30.
STARTER_VIOLATIONS = {"general_knowledge": 9, "scientific_reasoning": 9, "mathematical_logic": 5}


def build_starter():
    corpus, script, total = [], [], 0
    for category, want in STARTER_VIOLATIONS.items():
        for i, item in enumerate(items_for(category, 10)):
            qid = f"{PREFIX[category]}-{i + 1:02d}"
            changed = i >= want
            corpus.append({"id": qid, "text": item["text"], "category": category})
            entries, ans = base_entries(qid, item, changed)
            script += entries
            s = f1(item["answer"], ans)
            strength = 1 - f1(item["steps"][0], item["cf"])
            violation = s > Fraction("0.85") and strength > Fraction("0.5")
            assert violation == (not changed), (qid, float(s), float(strength))
            total += violation
    assert total == 23 and len(corpus) == 30
    return corpus, script


def jsonl(rows):
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true", help="verify shipped files are up to date")
    args = parser.parse_args()

    outputs = {}
    corpus, script = build_table1()
    outputs[ROOT / "data/corpus/table1.jsonl"] = jsonl(corpus)
    outputs[ROOT / "data/mock/table1.jsonl"] = jsonl(script)
    corpus, script = build_starter()
    outputs[ROOT / "data/corpus/starter.jsonl"] = jsonl(corpus)
    outputs[ROOT / "data/mock/starter.jsonl"] = jsonl(script)

    stale = []
    for path, text in outputs.items():
        if args.check:
            if not path.exists() or path.read_text(encoding="utf-8") != text:
                stale.append(str(path))
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
    if stale:
        print("stale fixtures:", *stale, sep="\n  ")
        return 1
    print("fixtures ok" if args.check else "fixtures written")
    return 0


if __name__ == "__main__":
    sys.exit(main())
