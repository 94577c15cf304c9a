"""Regenerate the bundled scenario fixtures.

Run from the repository root: python tools/make_fixtures.py
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "carenets" / "fixtures"

INTRA_CLINIC = ["emergency room", "orthopedic surgery", "physical therapy",
                "reception", "imaging"]


def move(origin, destination):
    return {"name": f"Go from {origin} to {destination}",
            "class": "transportation",
            "origin": origin, "destination": destination}


def acute():
    moves = [move(a, b) for a in INTRA_CLINIC for b in INTRA_CLINIC if a != b]
    moves.append(move("outside clinic", "reception"))
    moves.append(move("reception", "outside clinic"))

    schedule = [
        {"time": 0.0, "individual": "adam", "event": "Rupture ACL",
         "note": "sports injury at home; spontaneous onset"},
        {"time": 2.0, "individual": "adam", "process": "Monitor symptoms",
         "resource": "outside clinic",
         "note": "pain and swelling build over two hours before the visit"},
        # visit 1: emergency department
        {"time": 4.0, "individual": "adam",
         "process": "Go from outside clinic to reception",
         "resource": "patient"},
        {"time": 4.25, "individual": "adam",
         "process": "Go from reception to emergency room",
         "resource": "patient"},
        {"time": 4.5, "individual": "adam",
         "process": "Perform physical examination",
         "resource": "emergency room"},
        {"time": 5.0, "individual": "adam",
         "process": "Go from emergency room to imaging",
         "resource": "patient"},
        {"time": 5.25, "individual": "adam",
         "process": "Perform X-ray imaging", "resource": "imaging",
         "note": "no fracture found"},
        {"time": 5.75, "individual": "adam",
         "process": "Go from imaging to emergency room",
         "resource": "patient"},
        {"time": 6.0, "individual": "adam",
         "process": "Treat acute symptoms", "resource": "emergency room",
         "note": "anti-inflammatories plus ice, rest, and elevation advice"},
        {"time": 6.5, "individual": "adam",
         "process": "Fit assistive devices", "resource": "emergency room",
         "note": "elbow crutches"},
        {"time": 6.75, "individual": "adam",
         "process": "Decide care plan", "resource": "emergency room",
         "note": "refer to the orthopedic consultant"},
        {"time": 7.0, "individual": "adam",
         "process": "Go from emergency room to reception",
         "resource": "patient"},
        {"time": 7.25, "individual": "adam",
         "process": "Schedule clinic appointment", "resource": "reception"},
        {"time": 7.5, "individual": "adam",
         "process": "Go from reception to outside clinic",
         "resource": "patient"},
        # visit 2: orthopedic consultation and surgery
        {"time": 100.0, "individual": "adam",
         "process": "Go from outside clinic to reception",
         "resource": "patient"},
        {"time": 100.25, "individual": "adam",
         "process": "Go from reception to orthopedic surgery",
         "resource": "patient"},
        {"time": 100.5, "individual": "adam",
         "process": "Perform physical examination",
         "resource": "orthopedic surgery"},
        {"time": 101.0, "individual": "adam",
         "process": "Perform knee instability tests",
         "resource": "orthopedic surgery",
         "note": "anterior drawer, valgus stress, and Lachman tests; "
                 "inconclusive for pain and swelling"},
        {"time": 101.5, "individual": "adam",
         "process": "Go from orthopedic surgery to imaging",
         "resource": "patient"},
        {"time": 101.75, "individual": "adam",
         "process": "Perform MRI imaging", "resource": "imaging",
         "note": "shows the ACL rupture and a collateral ligament tear"},
        {"time": 102.75, "individual": "adam",
         "process": "Go from imaging to orthopedic surgery",
         "resource": "patient"},
        {"time": 103.0, "individual": "adam",
         "process": "Decide care plan", "resource": "orthopedic surgery",
         "note": "surgery indicated"},
        {"time": 103.25, "individual": "adam",
         "process": "Perform ACL reconstruction surgery",
         "resource": "orthopedic surgery"},
        {"time": 105.25, "individual": "adam",
         "process": "Go from orthopedic surgery to reception",
         "resource": "patient"},
        {"time": 105.5, "individual": "adam",
         "process": "Go from reception to outside clinic",
         "resource": "patient"},
        # visit 3: physical therapy
        {"time": 200.0, "individual": "adam",
         "process": "Go from outside clinic to reception",
         "resource": "patient"},
        {"time": 200.25, "individual": "adam",
         "process": "Go from reception to physical therapy",
         "resource": "patient"},
        {"time": 200.5, "individual": "adam",
         "process": "Perform physical examination",
         "resource": "physical therapy"},
        {"time": 201.0, "individual": "adam",
         "process": "Perform rehabilitation protocol",
         "resource": "physical therapy"},
        {"time": 202.0, "individual": "adam",
         "process": "Go from physical therapy to reception",
         "resource": "patient"},
        {"time": 202.25, "individual": "adam",
         "process": "Go from reception to outside clinic",
         "resource": "patient"},
    ]

    return {
        "schema_version": 1,
        "name": "acute-acl-repair",
        "title": "Acute care of an ACL rupture and repair",
        "notes": [
            "Acute orthopedic episode: emergency visit, orthopedic "
            "consultation with imaging and surgery, then rehabilitation.",
            "The schedule is a reconstruction of the course of care in the "
            "source clinical narrative; times are hours from the injury.",
            "Intra-clinic movement is modeled as every ordered pair of the "
            "five clinic buffers (20 moves) plus entry to and exit from "
            "reception.",
        ],
        "resources": [
            {"name": "emergency room", "class": "transformation"},
            {"name": "orthopedic surgery", "class": "transformation"},
            {"name": "physical therapy", "class": "transformation"},
            {"name": "reception", "class": "decision"},
            {"name": "imaging", "class": "measurement"},
            {"name": "outside clinic", "class": "measurement",
             "note": "home; the only capability exercised here is symptom "
                     "self-monitoring"},
            {"name": "patient", "class": "transportation", "human": True,
             "note": "the individual moves on their own"},
        ],
        "processes": [
            {"name": "Treat acute symptoms", "class": "transformation"},
            {"name": "Fit assistive devices", "class": "transformation"},
            {"name": "Perform ACL reconstruction surgery",
             "class": "transformation"},
            {"name": "Perform rehabilitation protocol",
             "class": "transformation"},
            {"name": "Decide care plan", "class": "decision"},
            {"name": "Schedule clinic appointment", "class": "decision"},
            {"name": "Perform physical examination", "class": "measurement"},
            {"name": "Perform knee instability tests",
             "class": "measurement"},
            {"name": "Perform X-ray imaging", "class": "measurement"},
            {"name": "Perform MRI imaging", "class": "measurement"},
            {"name": "Monitor symptoms", "class": "measurement"},
        ] + moves,
        "knowledge_base": [
            ["Treat acute symptoms", "emergency room"],
            ["Fit assistive devices", "emergency room"],
            ["Perform ACL reconstruction surgery", "orthopedic surgery"],
            ["Perform rehabilitation protocol", "physical therapy"],
            ["Decide care plan", "emergency room"],
            ["Decide care plan", "orthopedic surgery"],
            ["Schedule clinic appointment", "reception"],
            ["Perform physical examination", "emergency room"],
            ["Perform physical examination", "orthopedic surgery"],
            ["Perform physical examination", "physical therapy"],
            ["Perform knee instability tests", "orthopedic surgery"],
            ["Perform X-ray imaging", "imaging"],
            ["Perform MRI imaging", "imaging"],
            ["Monitor symptoms", "outside clinic"],
        ] + [[m["name"], "patient"] for m in moves],
        "initial_tokens": {"outside clinic": 1},
        "individuals": [{
            "id": "adam",
            "health_states": [
                "healthy", "ruptured ACL", "acute symptoms managed",
                "mobility supported", "post-operative recovery"],
            "health_events": [
                {"name": "Rupture ACL", "kind": "stochastic",
                 "consumes": "healthy", "produces": "ruptured ACL"},
                {"name": "Relieve acute symptoms", "kind": "induced",
                 "realized_by": ["Treat acute symptoms"],
                 "consumes": "ruptured ACL",
                 "produces": "acute symptoms managed"},
                {"name": "Support mobility", "kind": "induced",
                 "realized_by": ["Fit assistive devices"],
                 "consumes": "acute symptoms managed",
                 "produces": "mobility supported"},
                {"name": "Reconstruct ACL", "kind": "induced",
                 "realized_by": ["Perform ACL reconstruction surgery"],
                 "consumes": "mobility supported",
                 "produces": "post-operative recovery"},
                {"name": "Restore knee function", "kind": "induced",
                 "realized_by": ["Perform rehabilitation protocol"],
                 "consumes": "post-operative recovery",
                 "produces": "healthy",
                 "note": "successful acute care cycles back to the healthy "
                         "state"},
            ],
            "initial_state": "healthy",
        }],
        "schedule": schedule,
        "assumed_values": {
            "note": "Durations (hours), costs (dollars), and health state "
                    "values are modeling assumptions, not case data.",
            "durations": {
                "default": 0.25,
                "Monitor symptoms @ outside clinic": 2.0,
                "Perform physical examination @ emergency room": 0.5,
                "Perform physical examination @ orthopedic surgery": 0.5,
                "Perform physical examination @ physical therapy": 0.5,
                "Perform knee instability tests @ orthopedic surgery": 0.5,
                "Perform X-ray imaging @ imaging": 0.5,
                "Perform MRI imaging @ imaging": 1.0,
                "Treat acute symptoms @ emergency room": 0.5,
                "Perform ACL reconstruction surgery @ orthopedic surgery": 2.0,
                "Perform rehabilitation protocol @ physical therapy": 1.0,
            },
            "costs": {
                "default": 0.0,
                "Treat acute symptoms @ emergency room": 160.0,
                "Fit assistive devices @ emergency room": 60.0,
                "Perform ACL reconstruction surgery @ orthopedic surgery":
                    5200.0,
                "Perform rehabilitation protocol @ physical therapy": 140.0,
                "Decide care plan @ emergency room": 90.0,
                "Decide care plan @ orthopedic surgery": 90.0,
                "Schedule clinic appointment @ reception": 25.0,
                "Perform physical examination @ emergency room": 120.0,
                "Perform physical examination @ orthopedic surgery": 120.0,
                "Perform physical examination @ physical therapy": 120.0,
                "Perform knee instability tests @ orthopedic surgery": 150.0,
                "Perform X-ray imaging @ imaging": 180.0,
                "Perform MRI imaging @ imaging": 850.0,
            },
            "health_state_values": {
                "adam": {
                    "healthy": 1.0,
                    "ruptured ACL": 0.0,
                    "acute symptoms managed": 0.4,
                    "mobility supported": 0.5,
                    "post-operative recovery": 0.7,
                },
            },
            "health_event_durations": {
                "adam": {
                    "default": 0.0,
                    "Relieve acute symptoms": 0.5,
                    "Support mobility": 0.25,
                    "Reconstruct ACL": 2.0,
                    "Restore knee function": 1.0,
                },
            },
        },
    }


def chronic():
    therapy = "Perform radiation & chemotherapy treatment"
    responses = {"complete response": None, "partial response": None,
                 "stable disease": None, "progressive disease": None}

    schedule = [
        {"time": 0.0, "individual": "patient",
         "event": "Develop occipital tumor",
         "note": "spontaneous onset, months before presentation"},
        {"time": 30.0, "individual": "patient",
         "event": "Develop neurologic symptoms",
         "note": "headaches, intermittent short-term memory loss, nausea"},
        # visit 1: presentation, evaluation, head CT
        {"time": 120.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 120.125, "individual": "patient",
         "process": "Plan & schedule care", "resource": "care team"},
        {"time": 120.25, "individual": "patient",
         "process": "Perform imaging scan", "resource": "imaging",
         "note": "head CT finds the occipital-parietal mass"},
        {"time": 120.375, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
        # visit 2: MR confirmation, surgical planning
        {"time": 127.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 127.125, "individual": "patient",
         "process": "Perform imaging scan", "resource": "imaging",
         "note": "MR imaging confirms the location in the trigone"},
        {"time": 127.25, "individual": "patient",
         "process": "Plan & schedule care", "resource": "care team",
         "note": "parieto-occipital surgical approach planned"},
        {"time": 127.375, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
        # visit 3: resection with frozen-section analysis
        {"time": 134.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 134.125, "individual": "patient",
         "process": "Perform surgical resection", "resource": "neurosurgery",
         "outcome": "near-total resection",
         "note": "piecemeal removal continued until near-total"},
        {"time": 134.5, "individual": "patient",
         "process": "Perform pathology analysis", "resource": "pathology",
         "note": "frozen section: abnormal and cellular, not diagnostic"},
        {"time": 134.625, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
        # visit 4: post-operative imaging, histology, therapy planning
        {"time": 141.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 141.125, "individual": "patient",
         "process": "Perform imaging scan", "resource": "imaging",
         "note": "follow-up MR shows near-total removal"},
        {"time": 141.25, "individual": "patient",
         "process": "Perform pathology analysis", "resource": "pathology",
         "note": "histology grades the tumor as GBM, confirmed on review"},
        {"time": 141.375, "individual": "patient",
         "process": "Plan & schedule care", "resource": "care team",
         "note": "whole-brain radiation and chemotherapy instituted"},
        {"time": 141.5, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
        # visit 5: radiation and chemotherapy
        {"time": 150.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 150.125, "individual": "patient", "process": therapy,
         "resource": "oncology", "outcome": "stable disease"},
        {"time": 150.625, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
        # spontaneous course between visits
        {"time": 400.0, "individual": "patient",
         "event_group": ["Progress after progressive disease",
                         "Stabilize after complete response",
                         "Stabilize after partial response",
                         "Stabilize after stable disease"],
         "note": "whichever observation matches the realized response"},
        {"time": 500.0, "individual": "patient",
         "event_group": ["Return to asymptomatic baseline"],
         "optional": True,
         "note": "only reachable when the disease did not progress"},
        # visit 6: two-year follow-up imaging
        {"time": 850.0, "individual": "patient", "process": "Enter clinic",
         "resource": "patient"},
        {"time": 850.125, "individual": "patient",
         "process": "Perform imaging scan", "resource": "imaging",
         "note": "no evidence of progression at two-year follow-up"},
        {"time": 850.25, "individual": "patient", "process": "Exit clinic",
         "resource": "patient"},
    ]

    return {
        "schema_version": 1,
        "name": "chronic-neuro-oncology",
        "title": "Chronic care of a neuro-oncology case",
        "notes": [
            "Chronic neuro-oncology episode spanning six clinical visits "
            "over roughly two years; times are days from tumor onset.",
            "Movement inside the clinic is out of scope for chronic care: "
            "the clinic abstraction groups the clinic buffers into a "
            "single place, leaving enter and exit as the only movements.",
            "The schedule is a reconstruction of the course of care in the "
            "source clinical narrative.",
        ],
        "resources": [
            {"name": "neurosurgery", "class": "transformation",
             "note": "surgical team, room, and equipment as one aggregate"},
            {"name": "oncology", "class": "transformation"},
            {"name": "care team", "class": "decision",
             "note": "care planning and scheduling decisions combined"},
            {"name": "imaging", "class": "measurement"},
            {"name": "pathology", "class": "measurement"},
            {"name": "outside clinic", "class": "measurement",
             "note": "life outside the clinic between visits"},
            {"name": "patient", "class": "transportation", "human": True},
        ],
        "processes": [
            {"name": "Perform surgical resection", "class": "transformation"},
            {"name": therapy, "class": "transformation"},
            {"name": "Plan & schedule care", "class": "decision"},
            {"name": "Perform imaging scan", "class": "measurement"},
            {"name": "Perform pathology analysis", "class": "measurement"},
            {"name": "Enter clinic", "class": "transportation",
             "origin": "outside clinic", "destination": "care team"},
            {"name": "Exit clinic", "class": "transportation",
             "origin": "care team", "destination": "outside clinic"},
        ],
        "knowledge_base": [
            ["Perform surgical resection", "neurosurgery"],
            [therapy, "oncology"],
            ["Plan & schedule care", "care team"],
            ["Perform imaging scan", "imaging"],
            ["Perform pathology analysis", "pathology"],
            ["Enter clinic", "patient"],
            ["Exit clinic", "patient"],
        ],
        "chronic_abstraction": True,
        "initial_tokens": {"outside clinic": 1},
        "individuals": [{
            "id": "patient",
            "health_states": [
                "healthy", "occipital tumor present", "symptomatic tumor",
                "gross-total resection", "near-total resection",
                "sub-total resection", "complete response",
                "partial response", "stable disease", "progressive disease",
                "tumor progression", "no measurable progression",
                "asymptomatic"],
            "health_events": [
                {"name": "Develop occipital tumor", "kind": "stochastic",
                 "consumes": "healthy",
                 "produces": "occipital tumor present"},
                {"name": "Develop neurologic symptoms", "kind": "stochastic",
                 "consumes": "occipital tumor present",
                 "produces": "symptomatic tumor"},
                {"name": "Resect tumor", "kind": "induced",
                 "realized_by": ["Perform surgical resection"],
                 "consumes": "symptomatic tumor",
                 "produces": ["gross-total resection",
                              "near-total resection",
                              "sub-total resection"],
                 "note": "extent-of-resection outcomes are taken as equally "
                         "likely"},
                {"name": "Treat residual disease after gross-total resection",
                 "kind": "induced", "realized_by": [therapy],
                 "consumes": "gross-total resection",
                 "produces": dict(responses),
                 "note": "response graded per the McDonald criteria"},
                {"name": "Treat residual disease after near-total resection",
                 "kind": "induced", "realized_by": [therapy],
                 "consumes": "near-total resection",
                 "produces": dict(responses)},
                {"name": "Treat residual disease after sub-total resection",
                 "kind": "induced", "realized_by": [therapy],
                 "consumes": "sub-total resection",
                 "produces": dict(responses)},
                {"name": "Progress after progressive disease",
                 "kind": "stochastic", "consumes": "progressive disease",
                 "produces": "tumor progression"},
                {"name": "Stabilize after complete response",
                 "kind": "stochastic", "consumes": "complete response",
                 "produces": "no measurable progression"},
                {"name": "Stabilize after partial response",
                 "kind": "stochastic", "consumes": "partial response",
                 "produces": "no measurable progression"},
                {"name": "Stabilize after stable disease",
                 "kind": "stochastic", "consumes": "stable disease",
                 "produces": "no measurable progression"},
                {"name": "Return to asymptomatic baseline",
                 "kind": "stochastic",
                 "consumes": "no measurable progression",
                 "produces": "asymptomatic"},
            ],
            "initial_state": "healthy",
        }],
        "schedule": schedule,
        "assumed_values": {
            "note": "Durations (days), costs (dollars), state values, and "
                    "the treatment response weights are modeling "
                    "assumptions, not case data.",
            "durations": {
                "Perform surgical resection @ neurosurgery": 0.375,
                f"{therapy} @ oncology": 0.5,
                "Plan & schedule care @ care team": 0.125,
                "Perform imaging scan @ imaging": 0.125,
                "Perform pathology analysis @ pathology": 0.125,
                "Enter clinic @ patient": 0.125,
                "Exit clinic @ patient": 0.125,
            },
            "costs": {
                "Perform surgical resection @ neurosurgery": 18000.0,
                f"{therapy} @ oncology": 22000.0,
                "Plan & schedule care @ care team": 150.0,
                "Perform imaging scan @ imaging": 900.0,
                "Perform pathology analysis @ pathology": 600.0,
                "Enter clinic @ patient": 0.0,
                "Exit clinic @ patient": 0.0,
            },
            "health_state_values": {
                "patient": {
                    "healthy": 1.0,
                    "occipital tumor present": 0.6,
                    "symptomatic tumor": 0.35,
                    "gross-total resection": 0.75,
                    "near-total resection": 0.7,
                    "sub-total resection": 0.6,
                    "complete response": 0.9,
                    "partial response": 0.8,
                    "stable disease": 0.7,
                    "progressive disease": 0.3,
                    "tumor progression": 0.0,
                    "no measurable progression": 0.85,
                    "asymptomatic": 0.9,
                },
            },
            "health_event_weights": {
                "patient": {
                    "Treat residual disease after gross-total resection": {
                        "complete response": 0.25, "partial response": 0.25,
                        "stable disease": 0.25, "progressive disease": 0.25},
                    "Treat residual disease after near-total resection": {
                        "complete response": 0.25, "partial response": 0.25,
                        "stable disease": 0.25, "progressive disease": 0.25},
                    "Treat residual disease after sub-total resection": {
                        "complete response": 0.25, "partial response": 0.25,
                        "stable disease": 0.25, "progressive disease": 0.25},
                },
            },
            "health_event_durations": {
                "patient": {
                    "default": 0.0,
                    "Resect tumor": 0.375,
                    "Treat residual disease after gross-total resection": 0.5,
                    "Treat residual disease after near-total resection": 0.5,
                    "Treat residual disease after sub-total resection": 0.5,
                },
            },
        },
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in (("acute_acl.json", acute()),
                      ("chronic_neuro_oncology.json", chronic())):
        path = OUT / name
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
