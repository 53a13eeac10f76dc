#!/usr/bin/env python3
"""Builds script.json, the scripted responder for the reconstructed
60-session concordance corpus.

The responder follows the dialogue driven by `ontoeval validate` with the
default protocol: assert, clarify on unclear answers, relation, challenge
(child pairs demoted to a distant relation), modify, reassert.

    python3 generate_script.py
    ontoeval validate --sheet sheet.json --script script.json --parallel 1 --out run
    cp run/transcripts/*.jsonl corpus/
"""
import json
import xml.etree.ElementTree as ET
from pathlib import Path

here = Path(__file__).resolve().parent
rows = json.loads((here / "sheet.json").read_text())["rows"]

RDF = "{http://www.w3.org/1999/02/22-rdf-syntax-ns#}"
RDFS = "{http://www.w3.org/2000/01/rdf-schema#}"
OWL = "{http://www.w3.org/2002/07/owl#}"
label_of, parent_of = {}, {}
for cls in ET.parse(here / "sdoh_sample.owl").getroot().iter(OWL + "Class"):
    iri = cls.get(RDF + "about")
    label_of[iri] = cls.find(RDFS + "label").text
    sup = cls.find(RDFS + "subClassOf")
    if sup is not None:
        parent_of[iri] = sup.get(RDF + "resource")

AGREED = {"Proximity to industrial facilities", "Poor housing", "Overcrowded housing", "Economic instability",
          "Impact of food insecurity", "Unstable employment", "Bullying at school",
          "Social isolation of older adults", "Exposure to workplace hazards"}
PART_OF = {"Neighborhood and built environment", "Economic stability", "Social and community context"}
TYPE_OF = {"Poor workplace condition"}

# Challenge answers, keyed by child label.
ENUMERATIONS = {
    "Pest infested house": [
        "Overcrowding in house: more occupants than the dwelling was designed for",
        "Lack of basic amenities",
        "Exposure to environmental hazards",
        "Lack of ventilation",
        "Homelessness",
        "Insect or pest infestation: cockroaches, rodents or bed bugs",
        "Mold and dampness",
        "Structural deficiencies",
        "Inadequate heating",
        "Unsafe electrical wiring",
    ],
    "Housing with lead paint": [
        "Overcrowding in house",
        "Lead paint hazards in older homes",
        "Mold and dampness",
        "Lack of ventilation",
        "Inadequate heating",
        "Structural deficiencies",
        "Unsafe drinking water supply",
        "Insect or pest infestation",
        "Lack of basic amenities",
        "Homelessness",
    ],
    "Inability to enroll in federal assistance": [
        "Job loss",
        "Low wages",
        "Inability to enroll in federal assistance programs",
        "Housing cost burden",
        "Medical debt",
        "Lack of savings",
        "Unpredictable income",
        "Eviction risk",
        "Limited access to credit",
        "Dependence on payday loans",
    ],
    "Skipping meals due to cost": [
        "Hunger",
        "Skipping meals because of cost",
        "Reliance on food banks",
        "Malnutrition in children",
        "Anxiety about the household food supply",
        "Poor diet quality",
        "Obesity",
        "Iron deficiency anemia",
        "Reduced academic performance",
        "Chronic stress",
    ],
    "Limited access to green space": [
        "Access to parks and green space",
        "Walkability of streets",
        "Air quality",
        "Noise pollution",
        "Availability of public transport",
        "Neighborhood safety",
        "Access to healthy food outlets",
        "Quality of housing stock",
        "Proximity to industrial facilities",
        "Street lighting",
    ],
    "Metabolic disturbances from poor nutrition": [
        "Hunger",
        "Malnutrition in children",
        "Reliance on food banks",
        "Anxiety about the household food supply",
        "Poor diet quality",
        "Obesity",
        "Iron deficiency anemia",
        "Reduced academic performance",
        "Skipping meals because of cost",
        "Chronic stress",
    ],
    "Poor pairing of team members at work": [
        "Unsafe working conditions",
        "Long working hours",
        "Workplace harassment",
        "Low job control",
        "Exposure to workplace hazards",
        "Lack of rest breaks",
        "Job insecurity",
        "Inadequate training",
        "Poor management practices",
        "Excessive noise",
    ],
}

MODIFIED_CHILD = {
    "Pest infested house": "Housing with pest infestation",
    "Housing with lead paint": "Housing with lead paint hazards",
    "Inability to enroll in federal assistance": "Economic hardship from exclusion from federal assistance",
    "Skipping meals due to cost": "Food insecurity leading to skipped meals",
    "Limited access to green space": "Built environment with limited green space",
    "Metabolic disturbances from poor nutrition": "Food insecurity related metabolic disturbances",
    "Poor pairing of team members at work": "Poor workplace condition from team conflict",
    "Neighborhood and built environment": "Neighborhood and built environment determinants",
    "Economic stability": "Economic stability determinants",
    "Social and community context": "Social and community context determinants",
    "Poor workplace condition": "Workplace related social determinants",
}

UNCLEAR = [
    "Both concepts describe conditions that shape health outside the clinic.",
    "That depends on how broadly the parent concept is scoped.",
    "These concepts overlap in the literature on health disparities.",
    "The answer hinges on the definition used for the parent concept.",
]
YES = [
    "Yes, this is a valid parent-child relationship. \"{child}\" is a more specific concept within \"{parent}\".",
    "Yes, \"{child}\" can be considered a subclass of \"{parent}\".",
    "Yes. \"{child}\" narrows \"{parent}\" to a specific condition.",
]

# Sessions whose first answer needs two clarification prompts.
DOUBLE_CLARIFY = {3, 10, 17, 24, 31, 38, 45, 52}


def unclear(session, k):
    return UNCLEAR[(session + k) % len(UNCLEAR)]


def yes(session, parent, child):
    return YES[session % len(YES)].format(parent=parent, child=child)


def verdict_turns(session, answer, clarifications):
    return [unclear(session, k) for k in range(clarifications)] + [answer]


def enumeration(parent, items):
    lines = [f"Here are 10 concepts that have IS-A relationships to \"{parent}\":", ""]
    lines += [f"{i}. {item}" for i, item in enumerate(items, 1)]
    return "\n".join(lines)


def intermediate(parent_iri, child_iri):
    node = child_iri
    while parent_of.get(node) != parent_iri:
        node = parent_of[node]
    return label_of[node]


sessions = []
for n, row in enumerate(rows, 1):
    parent, child, stratum = row["parent_label"], row["child_label"], row["stratum"]
    assert_clarify = 2 if n in DOUBLE_CLARIFY else 0
    replies = []
    if stratum == "child" and child in AGREED:
        replies += verdict_turns(n, yes(n, parent, child), assert_clarify)
    elif stratum == "child" and (child in PART_OF or child in TYPE_OF):
        replies += verdict_turns(n, f"No, \"{child}\" is not a subclass of \"{parent}\". It describes a whole domain.",
                                 assert_clarify)
        if child in PART_OF:
            replies.append(f"\"{child}\" is part of \"{parent}\"; it is one of the domains that together make up "
                           "the framework rather than a subclass of it.")
        else:
            replies.append(f"\"{child}\" is a type of \"{parent}\" rather than a strict subclass, since it names one "
                           "setting in which those determinants act.")
        modified = MODIFIED_CHILD[child]
        replies.append(f"It could be renamed \"{modified}\" so that it reads as a subclass.")
        replies.append(f"Yes, \"{modified}\" is a valid child of \"{parent}\".")
    elif stratum == "child":
        replies += verdict_turns(n, "No, these concepts do not share a strict IS-A relationship. "
                                    f"\"{parent}\" and \"{child}\" can have a distant hierarchical relationship.",
                                 assert_clarify)
        replies.append(f"\"{child}\" is better described as a grandchild of \"{parent}\": \"{parent}\" can encompass "
                       f"a variety of conditions, and \"{child}\" is one specific form of one of them.")
        replies.append(enumeration(parent, ENUMERATIONS[child]))
        modified = MODIFIED_CHILD[child]
        replies.append(f"Rephrasing the child as \"{modified}\" would make the link direct.")
        replies.append(f"Yes, this is a valid IS-A relationship. \"{modified}\" sits directly under \"{parent}\".")
    elif stratum == "grandparent":
        middle = intermediate(row["parent_iri"], row["child_iri"])
        replies += verdict_turns(n, f"No, \"{child}\" is not a direct child of \"{parent}\".", assert_clarify)
        replies.append(f"The relationship is indirect: \"{child}\" is a grandchild of \"{parent}\" through an "
                       "intermediate concept.")
        replies.append(f"A direct child would be \"{middle}\", of which \"{child}\" is itself a subclass.")
        replies += verdict_turns(n, f"Yes, \"{middle}\" is a direct subclass of \"{parent}\".", 1)
    else:
        suggestion = f"{child} linked to {parent.lower()}"
        replies += verdict_turns(n, "No, these concepts do not share an IS-A relationship.", assert_clarify)
        replies.append(f"They are not related hierarchically; \"{child}\" belongs to a different area of social "
                       f"determinants than \"{parent}\".")
        replies.append(f"A concept such as \"{suggestion}\" would fit better, although the original child cannot be "
                       "moved without changing its meaning.")
        replies += verdict_turns(n, f"No, \"{suggestion}\" is still not a clear subclass of \"{parent}\".", 1)
    sessions.append({"parent": parent, "child": child, "responses": replies})

script = {"backend_id": "recorded-reconstruction", "sessions": sessions}
(here / "script.json").write_text(json.dumps(script, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
