"""Built-in data: the stock review template and comparison references.

The stock template ("global-orr") is the house checklist: eighteen categories
from intake pre-conditions through process discipline, 111 checkpoints in
total.  Three categories carry branching rules so that releases without batch
processing, cloud hosting or streaming pipelines simply drop those sections
instead of drowning reviewers in N/A rows.
"""

from __future__ import annotations

from .template import (
    AttributeSpec,
    Category,
    Checkpoint,
    ChecklistTemplate,
    ColorThresholds,
    ProfileSchema,
)

BUILTIN_TEMPLATE_NAME = "global-orr"
BUILTIN_TEMPLATE_VERSION = "1.0.0"

_SCHEMA = ProfileSchema(
    attributes=(
        AttributeSpec(name="has_batch", kind="boolean"),
        AttributeSpec(name="has_streaming", kind="boolean"),
        AttributeSpec(
            name="hosting", kind="enum", values=("datacenter", "cloud", "hybrid")
        ),
    )
)

# (category key, category name, applicability, [(checkpoint slug, prompt), ...])
# Prompts marked with a trailing "!" require evidence for a Compliant answer.
_CATEGORIES: list[tuple[str, str, str | None, list[tuple[str, str]]]] = [
    (
        "preconditions",
        "Pre-conditions to ORR",
        None,
        [
            ("intake_request", "Change intake request raised and linked to the release record"),
            ("scope_signed", "Scope of the change signed off by the business owner"),
            ("funding_approved", "Funding and budget approval recorded"),
            ("arch_review", "Architecture review completed with no open blockers"),
            ("design_docs", "High and low level design documents published"),
            ("env_inventory", "All target environments inventoried per region"),
            ("cmdb_current", "Configuration items registered and current in the CMDB"),
            ("stakeholders_named", "Accountable stakeholders named for every region"),
            ("support_model_drafted", "Support model drafted and circulated"),
            ("licenses_counted", "Software licenses counted against projected usage"),
            ("contracts_current", "Supplier contracts reviewed and in force"),
            ("regulatory_mapped", "Regulatory obligations mapped per operating region"),
            ("data_classification", "Data classification completed for all stores"),
            ("test_strategy", "Test strategy approved by quality engineering"),
            ("uat_signed", "User acceptance testing signed off"),
            ("perf_baseline_agreed", "Performance baseline and targets agreed"),
            ("rollback_plan", "Rollback plan written and rehearsal scheduled"),
            ("release_calendar", "Release slot booked on the change calendar"),
            ("comms_plan", "Stakeholder communication plan issued"),
            ("training_done", "Operations staff trained on the new service"),
            ("runbook_draft", "Runbook drafted and peer reviewed"),
            ("known_issues_logged", "Known issues logged with severity and owners"),
            ("exit_criteria", "Go / no-go exit criteria agreed with leadership"),
        ],
    ),
    (
        "capacity",
        "Capacity Planning Readiness",
        None,
        [
            ("demand_forecast", "Twelve month demand forecast documented"),
            ("headroom", "Compute headroom of at least 30 percent at projected peak"),
            ("storage_growth", "Storage growth modelled against retention policy"),
            ("network_bandwidth", "Network bandwidth sized for peak plus failover"),
            ("scaling_runbook", "Scale-out procedure documented and tested"),
            ("limits_reviewed", "Platform quotas and service limits reviewed"),
            ("load_test", "Load test executed at 125 percent of projected peak!"),
        ],
    ),
    (
        "performance",
        "Performances readiness",
        None,
        [
            ("slo_defined", "Latency and throughput SLOs defined per region"),
            ("perf_test_passed", "Performance test results meet the agreed baseline!"),
            ("soak_test", "Soak test of at least 24 hours completed"),
            ("degradation_modes", "Graceful degradation behaviour documented"),
            ("cache_strategy", "Cache sizing and eviction strategy reviewed"),
            ("profiling", "Hot paths profiled and no critical regressions open"),
        ],
    ),
    (
        "batch",
        "Batch Applications",
        "has_batch == true",
        [
            ("schedule_registered", "Batch schedule registered with the enterprise scheduler"),
            ("window_fits", "Critical batch window fits projected volumes with margin"),
            ("restart_documented", "Job restart and recovery steps documented"),
            ("dependencies_mapped", "Upstream and downstream job dependencies mapped"),
        ],
    ),
    (
        "touchpoints",
        "Application Touchpoints",
        None,
        [
            ("interfaces_cataloged", "All inbound and outbound interfaces cataloged"),
            ("contracts_versioned", "Interface contracts versioned and published"),
            ("timeout_budgets", "Timeout and retry budgets agreed with consumers"),
            ("backpressure", "Backpressure behaviour verified with dependent systems"),
            ("consumer_signoff", "Dependent system owners signed off on integration tests"),
        ],
    ),
    (
        "third_party",
        "3rd Party (Commercial Off-The-Shelf)",
        None,
        [
            ("vendor_support", "Vendor support agreement active with response times"),
            ("versions_supported", "Deployed product versions are under vendor support"),
            ("patch_policy", "Patching cadence agreed and scheduled"),
            ("escalation_path", "Escalation path to the vendor documented"),
        ],
    ),
    (
        "backup",
        "Backup / Recovery",
        None,
        [
            ("policy_applied", "Backup policy applied to every persistent store"),
            ("schedule_running", "Backup jobs scheduled and observed green"),
            ("restore_tested", "Restore rehearsed end to end in the last quarter!"),
            ("offsite_copy", "Off-site or cross-region copy configured"),
            ("retention_compliant", "Retention matches the data retention schedule"),
            ("encryption_at_rest", "Backups encrypted at rest with managed keys"),
        ],
    ),
    (
        "support",
        "Production Support",
        None,
        [
            ("model_approved", "Support model approved by regional operations leads"),
            ("oncall_roster", "On-call roster staffed for all shifts"),
            ("runbook_final", "Runbook finalised and stored in the operations portal"),
            ("sop_published", "Standard operating procedures published"),
            ("ticket_routing", "Ticket queues and routing rules configured"),
            ("sla_agreed", "Support SLAs agreed with the business"),
            ("handover_done", "Handover from project to operations completed"),
            ("knowledge_transfer", "Knowledge transfer sessions held and recorded"),
        ],
    ),
    (
        "network",
        "Networks & Firewalls",
        None,
        [
            ("diagram_current", "Network diagram current and stored with the design"),
            ("firewall_rules", "Firewall rules requested, applied and verified!"),
            ("dns_entries", "DNS entries created in every region"),
            ("cert_inventory", "TLS certificates inventoried with renewal dates"),
        ],
    ),
    (
        "infosec",
        "InfoSec & Malware",
        None,
        [
            ("threat_model", "Threat model reviewed by security engineering"),
            ("pen_test", "Penetration test findings remediated or accepted!"),
            ("malware_protection", "Anti-malware controls deployed on all hosts"),
            ("access_reviews", "Access rights reviewed and least-privilege applied"),
            ("secrets_managed", "Secrets held in the approved vault, none in code"),
            ("logging_security", "Security event logging wired to the SOC"),
            ("vuln_scanning", "Vulnerability scanning scheduled with alerting"),
        ],
    ),
    (
        "storage",
        "Storage",
        None,
        [
            ("tiers_assigned", "Storage tiers assigned per data temperature"),
            ("capacity_alerts", "Capacity alerts configured below saturation"),
            ("replication", "Replication topology matches the availability target"),
            ("lifecycle_rules", "Data lifecycle rules configured and tested"),
            ("performance_validated", "Storage latency validated under load"),
        ],
    ),
    (
        "servers",
        "Servers & Hosts",
        None,
        [
            ("builds_hardened", "Host builds hardened to the approved baseline"),
            ("patch_level", "Operating system patch levels current"),
            ("provisioning_automated", "Provisioning is repeatable from automation"),
            ("failover_tested", "Host failover tested in every region"),
            ("time_sync", "Clock synchronisation verified across the fleet"),
            ("asset_tagged", "Hosts tagged to the service in the asset register"),
        ],
    ),
    (
        "cloud",
        "Cloud Servers",
        "hosting in ['cloud', 'hybrid']",
        [
            ("landing_zone", "Cloud landing zone approved for the workload"),
            ("iam_baseline", "Cloud IAM roles follow the least-privilege baseline"),
            ("cost_guardrails", "Budget alerts and cost guardrails configured"),
            ("region_pairing", "Cloud regions paired for failover per policy"),
        ],
    ),
    (
        "database",
        "Database",
        None,
        [
            ("ha_configured", "High availability configured and failover tested"),
            ("slow_query_review", "Slow query review completed before cutover"),
            ("maintenance_jobs", "Index and statistics maintenance jobs scheduled"),
            ("connection_pooling", "Connection pooling sized against peak sessions"),
            ("schema_migrations", "Schema migration process rehearsed with rollback"),
        ],
    ),
    (
        "streaming",
        "Data Streaming",
        "has_streaming == true",
        [
            ("lag_alerting", "Consumer lag alerting configured per topic"),
            ("replay_procedure", "Replay and reprocessing procedure documented"),
            ("schema_registry", "Message schemas registered with compatibility rules"),
        ],
    ),
    (
        "monitoring",
        "Monitoring Tools",
        None,
        [
            ("golden_signals", "Golden signal dashboards live in every region"),
            ("alert_rules", "Alert rules reviewed against SLOs with owners"),
            ("synthetic_checks", "Synthetic checks running from each region"),
            ("log_aggregation", "Logs aggregated with retention per policy"),
            ("paging_tested", "Paging path tested end to end"),
            ("capacity_dashboards", "Capacity dashboards shared with operations"),
        ],
    ),
    (
        "dr",
        "Disaster Recovery",
        None,
        [
            ("rto_rpo_agreed", "RTO and RPO agreed and recorded"),
            ("dr_plan", "Disaster recovery plan published"),
            ("dr_exercise", "DR exercise completed inside the last year!"),
            ("data_sync_verified", "Cross-region data synchronisation verified"),
            ("dependencies_covered", "Critical dependencies included in the DR scope"),
        ],
    ),
    (
        "process",
        "Process",
        None,
        [
            ("change_policy", "Release follows the enterprise change policy"),
            ("orr_booked", "Readiness review booked with the regional boards"),
            ("lessons_loop", "Lessons learned loop scheduled post release"),
        ],
    ),
]


def builtin_template() -> ChecklistTemplate:
    categories = []
    for key, name, applicability, rows in _CATEGORIES:
        checkpoints = []
        for slug, prompt in rows:
            evidence_required = prompt.endswith("!")
            checkpoints.append(
                Checkpoint(
                    id=f"{key}.{slug}",
                    prompt=prompt.rstrip("!"),
                    applicability=applicability,
                    evidence_required=evidence_required,
                )
            )
        categories.append(Category(key=key, name=name, checkpoints=tuple(checkpoints)))
    return ChecklistTemplate(
        name=BUILTIN_TEMPLATE_NAME,
        version=BUILTIN_TEMPLATE_VERSION,
        profile_schema=_SCHEMA,
        thresholds=ColorThresholds(),
        categories=tuple(categories),
    )


# Coverage levels another organisation's published launch checklist assigns to
# the same ground, used by the comparator's stock reference.
GOOGLE_2016_ROWS: tuple[tuple[str, str], ...] = (
    ("Pre-requisites", "Partial"),
    ("Capacity", "Y"),
    ("Performance", "Y"),
    ("Batch", "N"),
    ("Application", "Y"),
    ("Third-Party", "Y"),
    ("Backup", "Y"),
    ("Support", "Partial"),
    ("Network", "Y"),
    ("Security", "Y"),
    ("Storage", "Y"),
    ("Hosting", "Y"),
    ("Database", "Indirectly"),
    ("Monitoring", "Y"),
    ("DR", "Y"),
    ("Process", "N"),
    ("Failure Scenarios", "Y"),
    ("Automation", "Y"),
)

GOOGLE_2016_NAME = "google-2016"
GOOGLE_2016_LABEL = "Google"
