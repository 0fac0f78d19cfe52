#!/usr/bin/env python3
"""Regenerates the scripted-backend fixture trees under fixtures/e2e and fixtures/cl.

Each scenario directory holds one scripted-reply file per engine role
(planner.json, executor.json, reflector.json) plus a task spec.  Strict
fixtures pin the exact call order; non-strict fixtures let one file serve
several control-flow paths (the backend scans forward for the first step
whose `match` substring occurs in the latest user message).
"""

import json
import os

ROOT = os.path.dirname(os.path.abspath(__file__))


def fenced(obj, thought=None):
    body = "```json\n" + json.dumps(obj, indent=2) + "\n```"
    if thought:
        return "Thought: " + thought + "\n" + body
    return body


def action(tool, arguments, thought):
    return fenced({"tool": tool, "arguments": arguments}, thought)


def done(summary, thought):
    return fenced({"done": True, "summary": summary}, thought)


def plan(items):
    return fenced({"plan": items})


def review(complete, summary, residuals=None):
    return fenced({
        "overall_complete": complete,
        "summary": summary,
        "residual_items": residuals or [],
    })


def checklist(items):
    return fenced({"items": items})


def checks(entries):
    return fenced({"checks": entries})


def verdict_success(items):
    return fenced({"flag": "success", "items": items})


def verdict_failure(items, causes, remediations, evidence_steps):
    return fenced({
        "flag": "failure",
        "items": items,
        "failure": {
            "causes": causes,
            "remediations": remediations,
            "evidence_steps": evidence_steps,
        },
    })


def sop(application, function, summary, steps, preconditions=None,
        parameters=None, notes=None):
    return fenced({
        "application": application,
        "function": function,
        "summary": summary,
        "preconditions": preconditions or [],
        "steps": steps,
        "parameters": parameters or [],
        "notes": notes or [],
    })


def upgrade(strategic, tools):
    return fenced({"strategic": strategic, "tools": tools})


def merge_noop():
    return fenced({})


def write(path, payload):
    full = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print("wrote", path)


def backend(strict, steps):
    return {"strict": strict, "steps": [{"match": m, "reply": r} for m, r in steps]}


# ---------------------------------------------------------------------------
# e2e/inventory-summary: clean two-sub-task run, both verified successes.
# ---------------------------------------------------------------------------

def gen_inventory_summary():
    d = "e2e/inventory-summary"
    write(d + "/task.json", {
        "id": "inventory-summary",
        "description": "Compile the quarterly inventory summary: create /data/summary.txt "
                       "containing the line 'widgets: 42', then post a confirmation that the "
                       "summary is ready to the #inventory channel.",
        "initial_state": {
            "dirs": ["/data"],
            "chat": {"channels": {"inventory": []}},
        },
        "checkpoints": [
            {"id": "summary-file-written",
             "validator": {"kind": "file_contains", "path": "/data/summary.txt",
                           "needle": "widgets: 42"}},
            {"id": "confirmation-posted",
             "validator": {"kind": "message_sent_matching", "channel": "inventory",
                           "pattern": "summary ready"}},
        ],
    })
    write(d + "/planner.json", backend(True, [
        ("Produce the initial plan", plan([
            {"desc": "Write the inventory summary file",
             "goal": "/data/summary.txt exists and contains the line 'widgets: 42'"},
            {"desc": "Post a confirmation to the inventory channel",
             "goal": "a message containing 'summary ready' is posted to #inventory"},
        ])),
        ("Concluded sub-task st-001", plan([{"id": "st-002"}])),
        ("Concluded sub-task st-002", plan([])),
        ("Perform the final review", review(True, "Both deliverables are present: the summary "
                                                  "file and the channel confirmation.")),
    ]))
    write(d + "/executor.json", backend(True, [
        ("Sub-task st-001", action(
            "run_cmd", {"command": "echo 'widgets: 42' > /data/summary.txt"},
            "Write the required line into the summary file.")),
        ("Observation (step 1)", action(
            "run_cmd", {"command": "cat /data/summary.txt"},
            "Read the file back to confirm the exact content.")),
        ("Observation (step 2)", done(
            "Created /data/summary.txt containing 'widgets: 42' and verified its contents.",
            "The read-back shows the expected line; the sub-task goal is met.")),
        ("Sub-task st-002", action(
            "run_cmd", {"command": "chat send inventory Inventory summary ready: see /data/summary.txt"},
            "Post the confirmation message to the inventory channel.")),
        ("Observation (step 1)", action(
            "run_cmd", {"command": "chat read inventory"},
            "Read the channel back to confirm the message landed.")),
        ("Observation (step 2)", done(
            "Posted the confirmation to #inventory and verified it appears in the channel.",
            "The channel shows the posted message.")),
    ]))
    write(d + "/reflector.json", backend(True, [
        ("Produce the ordered checklist", checklist([
            {"dimension": "deliverable",
             "description": "/data/summary.txt exists and contains the line 'widgets: 42'",
             "method": "active_verification"},
            {"dimension": "truthfulness",
             "description": "the agent's verification claim is backed by a recorded observation",
             "method": "trajectory_reference"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /data/summary.txt"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the file holds the required line"},
            {"item": 2, "passed": True, "evidence": {"step": 2},
             "note": "step 2 shows the read-back observation"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "FileHub", "Create Text Report",
            "Write a small text report with shell redirection and verify it by reading it back.",
            [{"text": "Write the content with: echo '<content>' > <path>", "evidence": [1]},
             {"text": "Read the file back with: cat <path> and compare against the expected line",
              "evidence": [2]}],
            preconditions=["the target directory exists"],
            parameters=["path", "content"],
            notes=["command output ends with a returncode line; require returncode 0"])),
        ("Produce the ordered checklist", checklist([
            {"dimension": "deliverable",
             "description": "a message containing 'summary ready' was posted to #inventory",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "chat read inventory"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the confirmation message is present in the channel"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "TeamChat", "Post Channel Update",
            "Post a status message to a channel and read the channel back to confirm delivery.",
            [{"text": "Send with: chat send <channel> <message>", "evidence": [1]},
             {"text": "Confirm with: chat read <channel>", "evidence": [2]}],
            parameters=["channel", "message"])),
        ("Perform the post-task memory upgrade", upgrade(
            [{"dilemma": "a deliverable must be produced and its presence proven",
              "strategy": "after creating any artifact, read it back from the environment and "
                          "cite that observation as evidence"}],
            [{"tool": "run_cmd",
              "static_description": "Execute one shell command inside the simulated workspace; "
                                    "output always ends with a 'returncode: N' line.",
              "dynamic_instruction": "Check the returncode line before trusting the output."}])),
        ("Produce a merge plan", merge_noop()),
    ]))


# ---------------------------------------------------------------------------
# e2e/version-record: hallucinated completion, failed verdict, retry succeeds.
# ---------------------------------------------------------------------------

def gen_version_record():
    d = "e2e/version-record"
    write(d + "/task.json", {
        "id": "version-record",
        "description": "Record the deployment version: create /app/VERSION containing '2.4.1'.",
        "initial_state": {"dirs": ["/app"]},
        "checkpoints": [
            {"id": "version-file-recorded",
             "validator": {"kind": "file_contains", "path": "/app/VERSION",
                           "needle": "2.4.1"}},
        ],
    })
    write(d + "/planner.json", backend(True, [
        ("Produce the initial plan", plan([
            {"desc": "Create the VERSION file",
             "goal": "/app/VERSION exists and contains 2.4.1"},
        ])),
        ("Concluded sub-task st-001", plan([])),
        ("Perform the final review", review(True, "The version file is in place.")),
    ]))
    write(d + "/executor.json", backend(True, [
        ("Sub-task st-001", done(
            "Created /app/VERSION with 2.4.1.",
            "This is a routine file write; it is surely already done.")),
        ("This is a retry of a failed attempt", action(
            "run_cmd", {"command": "echo 2.4.1 > /app/VERSION"},
            "The failure report says nothing was written; actually create the file this time.")),
        ("Observation (step 1)", action(
            "run_cmd", {"command": "cat /app/VERSION"},
            "Verify the file content.")),
        ("Observation (step 2)", done(
            "Wrote /app/VERSION containing 2.4.1 and verified it by reading it back.",
            "The read-back confirms the content.")),
    ]))
    write(d + "/reflector.json", backend(True, [
        ("Produce the ordered checklist", checklist([
            {"dimension": "truthfulness",
             "description": "the claimed file creation is supported by a recorded action",
             "method": "trajectory_reference"},
        ])),
        ("Produce the ordered checklist", checklist([
            {"dimension": "deliverable",
             "description": "/app/VERSION exists and contains 2.4.1",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /app/VERSION"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the file contains 2.4.1"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "FileHub", "Record Version File",
            "Write a version marker file and verify it by reading it back.",
            [{"text": "Write the version with: echo <version> > <path>", "evidence": [1]},
             {"text": "Verify with: cat <path>", "evidence": [2]}],
            parameters=["path", "version"])),
        ("Perform the post-task memory upgrade", upgrade(
            [{"dilemma": "an agent may declare success without acting",
              "strategy": "never declare done before at least one verifying observation exists "
                          "in the trajectory"}],
            [])),
        ("Produce a merge plan", merge_noop()),
    ]))


# ---------------------------------------------------------------------------
# e2e/launch-note: both attempts fail, planner replans, recovery succeeds.
# ---------------------------------------------------------------------------

def gen_launch_note():
    d = "e2e/launch-note"
    write(d + "/task.json", {
        "id": "launch-note",
        "description": "Publish the launch note: create /docs/note.txt containing the exact "
                       "text 'LAUNCH GO'.",
        "initial_state": {"dirs": ["/docs"]},
        "checkpoints": [
            {"id": "launch-note-published",
             "validator": {"kind": "file_contains", "path": "/docs/note.txt",
                           "needle": "LAUNCH GO"}},
        ],
    })
    write(d + "/planner.json", backend(True, [
        ("Produce the initial plan", plan([
            {"desc": "Write the launch note",
             "goal": "/docs/note.txt contains the exact text LAUNCH GO"},
        ])),
        ("Concluded sub-task st-001", plan([
            {"desc": "Recover: write the launch note exactly as specified",
             "goal": "/docs/note.txt contains the exact text LAUNCH GO"},
        ])),
        ("Concluded sub-task st-002", plan([])),
        ("Perform the final review", review(True, "The launch note now carries the exact text.")),
    ]))
    write(d + "/executor.json", backend(True, [
        ("Sub-task st-001", action(
            "run_cmd", {"command": "echo LAUNCH PENDING > /docs/note.txt"},
            "Write the launch note.")),
        ("Observation (step 1)", done(
            "Wrote the launch note.",
            "The file is written.")),
        ("This is a retry of a failed attempt", action(
            "run_cmd", {"command": "cat /docs/note.txt"},
            "Inspect the current note content.")),
        ("Observation (step 1)", done(
            "The note file exists.",
            "The file is there, so the goal should be satisfied.")),
        ("Sub-task st-002", action(
            "run_cmd", {"command": "echo LAUNCH GO > /docs/note.txt"},
            "Overwrite the note with the exact required text.")),
        ("Observation (step 1)", action(
            "run_cmd", {"command": "cat /docs/note.txt"},
            "Verify the replacement content.")),
        ("Observation (step 2)", done(
            "note.txt now contains LAUNCH GO, confirmed by reading it back.",
            "The exact text is in place.")),
    ]))
    write(d + "/reflector.json", backend(True, [
        ("Produce the ordered checklist", checklist([
            {"dimension": "data_fidelity",
             "description": "note.txt contains exactly the text LAUNCH GO",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /docs/note.txt"}},
        ])),
        ("Produce the final verdict", verdict_failure(
            [{"item": 1, "passed": False, "evidence": {"check": 1},
              "note": "the file contains 'LAUNCH PENDING', not 'LAUNCH GO'"}],
            causes=["the note was written with placeholder text instead of the required "
                    "'LAUNCH GO'"],
            remediations=["overwrite /docs/note.txt with the exact text 'LAUNCH GO'"],
            evidence_steps=[1])),
        ("Produce the ordered checklist", checklist([
            {"dimension": "data_fidelity",
             "description": "note.txt contains exactly the text LAUNCH GO",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /docs/note.txt"}},
        ])),
        ("Produce the final verdict", verdict_failure(
            [{"item": 1, "passed": False, "evidence": {"check": 1},
              "note": "the retry only re-read the wrong content and never fixed it"}],
            causes=["the retry verified the wrong content but never replaced it"],
            remediations=["replace the file content with the exact text 'LAUNCH GO'"],
            evidence_steps=[1])),
        ("Produce the ordered checklist", checklist([
            {"dimension": "data_fidelity",
             "description": "note.txt contains exactly the text LAUNCH GO",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /docs/note.txt"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the note now reads LAUNCH GO"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "FileHub", "Publish Launch Note",
            "Overwrite a note file with the exact required text and verify by reading it back.",
            [{"text": "Overwrite with: echo <exact text> > <path>", "evidence": [1]},
             {"text": "Verify with: cat <path> and compare character-for-character",
              "evidence": [2]}],
            parameters=["path", "text"],
            notes=["placeholder content does not satisfy exact-text goals"])),
        ("Perform the post-task memory upgrade", upgrade(
            [{"dilemma": "a failed retry leaves the goal unmet",
              "strategy": "replan with a narrowly scoped recovery sub-task that restates the "
                          "exact expected artifact"}],
            [])),
        ("Produce a merge plan", merge_noop()),
    ]))


# ---------------------------------------------------------------------------
# e2e/feedback-collection: DM three colleagues, aggregate replies, close issue.
# ---------------------------------------------------------------------------

def gen_feedback_collection():
    d = "e2e/feedback-collection"
    write(d + "/task.json", {
        "id": "feedback-collection",
        "description": "Collect meeting feedback from alice, bob, and carol over direct "
                       "messages, record every reply in /notes/feedback.txt, then mark issue "
                       "FB-7 in project ops as done.",
        "initial_state": {
            "dirs": ["/notes"],
            "chat": {
                "npc_replies": {
                    "@alice": [{"author": "alice", "reply": "The meeting was productive."}],
                    "@bob": [{"author": "bob", "reply": "Please share slides earlier."}],
                    "@carol": [{"author": "carol", "reply": "All good."}],
                },
            },
            "issues": {
                "ops": [{"id": "FB-7", "title": "Collect meeting feedback",
                         "fields": {"status": "open"}}],
            },
        },
        "checkpoints": [
            {"id": "alice-contacted",
             "validator": {"kind": "message_sent_matching", "channel": "@alice",
                           "pattern": "feedback"}},
            {"id": "alice-reply-recorded",
             "validator": {"kind": "file_contains", "path": "/notes/feedback.txt",
                           "needle": "productive"}},
            {"id": "bob-reply-recorded",
             "validator": {"kind": "file_contains", "path": "/notes/feedback.txt",
                           "needle": "slides earlier"}},
            {"id": "issue-closed",
             "validator": {"kind": "issue_field_equals", "project": "ops", "id": "FB-7",
                           "field": "status", "value": "done"}},
        ],
    })
    write(d + "/planner.json", backend(True, [
        ("Produce the initial plan", plan([
            {"desc": "DM the three colleagues and record their replies",
             "goal": "/notes/feedback.txt holds one line per colleague reply"},
            {"desc": "Mark issue FB-7 in project ops as done",
             "goal": "issue FB-7 has status done"},
        ])),
        ("Concluded sub-task st-001", plan([{"id": "st-002"}])),
        ("Concluded sub-task st-002", plan([])),
        ("Perform the final review", review(True, "All three replies are recorded and the "
                                                  "tracking issue is closed.")),
    ]))
    feedback_code = ('write_file("/notes/feedback.txt", "alice: The meeting was productive.\\n'
                     'bob: Please share slides earlier.\\ncarol: All good.\\n")')
    write(d + "/executor.json", backend(True, [
        ("Sub-task st-001", action(
            "run_cmd", {"command": "chat dm alice Please share your feedback on the quarterly meeting"},
            "Ask alice for feedback first.")),
        ("Observation (step 1)", action(
            "run_cmd", {"command": "chat dm bob Please share your feedback on the quarterly meeting"},
            "Alice replied; now ask bob.")),
        ("Observation (step 2)", action(
            "run_cmd", {"command": "chat dm carol Please share your feedback on the quarterly meeting"},
            "Bob replied; now ask carol.")),
        ("Observation (step 3)", action(
            "run_python_code", {"code": feedback_code},
            "All three replies are in; write them to the feedback file verbatim.")),
        ("Observation (step 4)", done(
            "Collected feedback from alice, bob, and carol and recorded all three replies in "
            "/notes/feedback.txt.",
            "The file write returned cleanly.")),
        ("Sub-task st-002", action(
            "run_cmd", {"command": "issues update ops FB-7 status done"},
            "Close the tracking issue.")),
        ("Observation (step 1)", done(
            "Marked issue FB-7 as done.",
            "The tracker confirmed the field update.")),
    ]))
    write(d + "/reflector.json", backend(True, [
        ("Produce the ordered checklist", checklist([
            {"dimension": "deliverable",
             "description": "the feedback file aggregates all three colleague replies",
             "method": "active_verification"},
            {"dimension": "data_fidelity",
             "description": "each recorded reply matches a direct-message observation",
             "method": "trajectory_reference"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "cat /notes/feedback.txt"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the file lists all three replies"},
            {"item": 2, "passed": True, "evidence": {"step": 3},
             "note": "the recorded lines match the DM observations in steps 1-3"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "TeamChat", "Collect Colleague Feedback",
            "DM each colleague, wait for the reply in the same channel, then aggregate all "
            "replies verbatim into one note file.",
            [{"text": "Message each colleague with: chat dm <name> <request>", "evidence": [1, 2, 3]},
             {"text": "Copy each reply line from the DM observation without paraphrasing",
              "evidence": [4]},
             {"text": "Write the aggregate file in one shot with run_python_code write_file",
              "evidence": [4]}],
            preconditions=["every colleague is reachable over DM"],
            parameters=["colleague names", "output path"],
            notes=["replies arrive in the same observation as the sent DM"])),
        ("Produce the ordered checklist", checklist([
            {"dimension": "deliverable",
             "description": "issue FB-7 in project ops has status done",
             "method": "active_verification"},
        ])),
        ("List the verification actions", checks([
            {"item": 1, "tool": "run_cmd", "arguments": {"command": "issues show ops FB-7"}},
        ])),
        ("Produce the final verdict", verdict_success([
            {"item": 1, "passed": True, "evidence": {"check": 1},
             "note": "the issue status reads done"},
        ])),
        ("Summarize the effective operational sequence", sop(
            "IssueTracker", "Close Issue",
            "Set the status field of a tracked issue to done and confirm with issues show.",
            [{"text": "Update with: issues update <project> <id> status done", "evidence": [1]},
             {"text": "Confirm with: issues show <project> <id>", "evidence": [1]}],
            parameters=["project", "issue id"])),
        ("Perform the post-task memory upgrade", upgrade(
            [{"dilemma": "multi-party information gathering risks dropped or paraphrased replies",
              "strategy": "record every reply verbatim immediately and aggregate from the "
                          "recorded observations, never from recollection"}],
            [{"tool": "access_guide",
              "static_description": "Retrieve stored operation guides for platform applications "
                                    "before attempting an unfamiliar flow.",
              "dynamic_instruction": "Review the returned guide before issuing the next action."}])),
        ("Produce a merge plan", merge_noop()),
    ]))


# ---------------------------------------------------------------------------
# cl suite: five result-file tasks.  Fast path (guide lookup) when procedural
# memory is populated; wasteful exploration otherwise.  Tasks 02-05 fail
# outright without the guide; task 01 succeeds slowly and seeds the guide.
# ---------------------------------------------------------------------------

def gen_cl_task(i, slow_succeeds):
    tid = f"cl-result-{i:02d}"
    path = f"/work/out-{i}.txt"
    content = f"RESULT-{i}-DONE"
    write(f"cl/tasks/{tid}.json", {
        "id": tid,
        "description": f"Create the result file {path} containing {content}.",
        "initial_state": {"dirs": ["/work"]},
        "checkpoints": [
            {"id": "result-file-present",
             "validator": {"kind": "file_contains", "path": path, "needle": content}},
        ],
    })
    d = f"cl/backends/{tid}"

    write(d + "/planner.json", backend(False, [
        ("Produce the initial plan", plan([
            {"desc": f"Produce the result file for job {i}",
             "goal": "the expected result file exists in /work"},
        ])),
        ("Produce the updated plan", plan([])),
        (f"Files (1): {path}", review(True, "The result file is present.")),
        ("Perform the final review", review(False, "The result file is missing.",
                                            [f"create {path}"])),
        ("Produce the updated plan", plan([])),
        ("Perform the final review", review(False, "The result file is still missing.",
                                            [f"create {path}"])),
        ("Produce the updated plan", plan([])),
        ("Perform the final review", review(False, "The result file was never produced.",
                                            [f"create {path}"])),
    ]))

    fast = [
        ("Procedural memory index:", action(
            "access_guide", {"batch_requests": {"FileHub": ["Produce Result File"]}},
            "The memory index lists a FileHub guide; fetch it before acting.")),
        ("Guide for FileHub", action(
            "run_cmd", {"command": f"echo {content} > {path}"},
            "Follow the stored procedure: write the expected content directly.")),
        ("Observation (step 2)", done(
            f"Wrote {path} following the stored FileHub procedure.",
            "The write returned cleanly; per the guide this completes the job.")),
    ]
    if slow_succeeds:
        slow = [
            ("", action("run_cmd", {"command": "ls /data"},
                        "Look for an existing data directory first.")),
            ("", action("run_cmd", {"command": "cat /work/readme.md"},
                        "Maybe a readme describes the expected output.")),
            ("", action("run_cmd", {"command": "pwd"},
                        "Check where the shell starts.")),
            ("", action("run_python_code", {"code": f"print(exists('{path}'))"},
                        "See whether the result file already exists.")),
            ("", action("run_cmd", {"command": "ls /work"},
                        "Inspect the work directory contents.")),
            ("", action("run_cmd", {"command": f"echo {content} > {path}"},
                        "Nothing pre-exists; write the expected content now.")),
            ("", action("run_cmd", {"command": f"cat {path}"},
                        "Verify the written file.")),
            ("", done(f"Created {path} with the expected content after exploring the workspace.",
                      "The read-back confirms the content.")),
        ]
    else:
        slow = [
            ("", action("run_cmd", {"command": "ls /data"},
                        "Look for an existing data directory first.")),
            ("", action("run_cmd", {"command": "cat /work/notes.txt"},
                        "Maybe notes describe the expected output.")),
            ("", action("run_cmd", {"command": "pwd"},
                        "Check where the shell starts.")),
            ("", done("The result file should now be in place.",
                      "The workspace looks prepared.")),
            ("", action("run_cmd", {"command": "ls /work"},
                        "Re-inspect the work directory.")),
            ("", done("Confirmed the workspace; the result file is prepared.",
                      "Everything needed appears present.")),
        ]
    write(d + "/executor.json", backend(False, fast + slow))

    cl_checklist = checklist([
        {"dimension": "deliverable",
         "description": "the result file for this job exists in /work with the expected content",
         "method": "active_verification"},
    ])
    cl_checks = checks([
        {"item": 1, "tool": "run_cmd", "arguments": {"command": f"cat {path}"}},
    ])
    success = verdict_success([
        {"item": 1, "passed": True, "evidence": {"check": 1},
         "note": "the file holds the expected content"},
    ])
    failure = verdict_failure(
        [{"item": 1, "passed": False, "evidence": {"check": 1},
          "note": "the result file is missing"}],
        causes=["the result file was never created"],
        remediations=["write the expected content with the documented FileHub procedure"],
        evidence_steps=[1])
    distilled = sop(
        "FileHub", "Produce Result File",
        "Create a result file by writing the expected content with shell redirection and "
        "verifying by reading it back.",
        [{"text": "Write the expected content with: echo <content> > /work/<name>",
          "evidence": [1]},
         {"text": "Confirm with: cat /work/<name>", "evidence": [2]}],
        preconditions=["the /work directory exists"],
        parameters=["name", "content"],
        notes=["prefer this direct write over exploratory listing"])
    upgraded = upgrade(
        [{"dilemma": "familiar artifact-creation work arrives repeatedly",
          "strategy": "check the procedural guide index first and follow the stored procedure "
                      "instead of re-exploring the workspace"}],
        [])

    if slow_succeeds:
        steps = [
            ("Produce the ordered checklist", cl_checklist),
            ("List the verification actions", cl_checks),
            ("Produce the final verdict", success),
            ("Summarize the effective operational sequence", distilled),
            ("Perform the post-task memory upgrade", upgraded),
            ("Produce a merge plan", merge_noop()),
        ]
    else:
        steps = [
            ("Produce the ordered checklist", cl_checklist),
            ("List the verification actions", cl_checks),
            (content, success),
            ("Produce the final verdict", failure),
            ("Produce the ordered checklist", cl_checklist),
            ("List the verification actions", cl_checks),
            ("Produce the final verdict", failure),
            ("Summarize the effective operational sequence", distilled),
            ("Perform the post-task memory upgrade", upgraded),
            ("Produce a merge plan", merge_noop()),
        ]
    write(d + "/reflector.json", backend(False, steps))


def main():
    gen_inventory_summary()
    gen_version_record()
    gen_launch_note()
    gen_feedback_collection()
    for i in range(1, 6):
        gen_cl_task(i, slow_succeeds=(i == 1))


if __name__ == "__main__":
    main()
